#include "json.hpp"
#include "mdetail/geometry/geometry.hpp"

namespace mdetail::geometry {

namespace {

// Index = material id.
const std::array<Material, 8> kMaterials{{
    {"none", 0.0, 0.0, 0.0},
    {"plaster", 0.1, 0.0, 1.0},
    {"glass", 0.9, 0.5, 0.0},
    {"wood", 0.3, 0.05, 0.6},
    {"stone", 0.2, 0.02, 0.8},
    {"metal", 0.6, 0.3, 0.3},
    {"tile", 0.15, 0.0, 1.0},
    {"brick", 0.1, 0.0, 1.0},
}};

constexpr std::array<std::uint8_t, kLabelCount> kLabelMaterial{
    0,  // background
    1,  // wall
    2,  // window
    3,  // door
    4,  // sill
    4,  // ledge
    4,  // molding
    5,  // balcony
    2,  // pane
    6,  // roof
    6,  // flat_roof
    6,  // ridge
    6,  // valley
    7,  // chimney
    2,  // roof_window
};

} // namespace

std::span<const Material> materials() { return kMaterials; }

std::uint8_t material_id(Label label) { return kLabelMaterial[std::size_t(label)]; }

MaterialMap assign_materials(const LabelGrid& labels) {
    MaterialMap m;
    m.width = labels.width;
    m.height = labels.height;
    m.ids.reserve(labels.labels.size());
    for (Label l : labels.labels) m.ids.push_back(material_id(l));
    return m;
}

MaterialMap assign_materials(const Image& label_rgb) { return assign_materials(decode_labels(label_rgb)); }

Image material_image(const MaterialMap& map) {
    Image out(map.width, map.height, 1);
    for (std::size_t i = 0; i < map.ids.size(); ++i) out.data()[i] = from_byte(map.ids[i]);
    return out;
}

std::string materials_json() {
    nlohmann::json mats = nlohmann::json::array();
    for (std::size_t i = 0; i < kMaterials.size(); ++i)
        mats.push_back({{"id", i},
                        {"name", kMaterials[i].name},
                        {"glossiness", kMaterials[i].glossiness},
                        {"reflectivity", kMaterials[i].reflectivity},
                        {"roughness_weight", kMaterials[i].roughness_weight}});
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& e : palette()) labels[std::string(e.name)] = material_id(e.label);
    return nlohmann::json{{"materials", mats}, {"labels", labels}}.dump(2);
}

std::array<double, kLabelCount> roughness_weights() {
    std::array<double, kLabelCount> w{};
    for (int l = 0; l < kLabelCount; ++l) w[std::size_t(l)] = kMaterials[kLabelMaterial[std::size_t(l)]].roughness_weight;
    return w;
}

} // namespace mdetail::geometry

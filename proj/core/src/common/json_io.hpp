#pragma once

#include "json.hpp"
#include "mdetail/error.hpp"
#include "mdetail/regularize/regularize.hpp"
#include "mdetail/style/style.hpp"

namespace mdetail {

inline nlohmann::json box_to_json(const regularize::DetailBox& b) {
    nlohmann::json j{{"label", std::string(label_name(b.label))},
                     {"rect", {b.rect.x, b.rect.y, b.rect.w, b.rect.h}},
                     {"rot", b.rotation_deg},
                     {"source", std::string(regularize::source_name(b.source))}};
    if (b.dormer) j["dormer"] = true;
    if (b.pitch >= 0) j["pitch"] = b.pitch;
    return j;
}

inline regularize::DetailBox box_from_json(const nlohmann::json& j, const std::string& path) {
    regularize::DetailBox b;
    try {
        const auto label = label_from_name(j.at("label").get<std::string>());
        if (!label) throw ParseError(path + ".label", "unknown label");
        b.label = *label;
        const auto& r = j.at("rect");
        if (!r.is_array() || r.size() != 4) throw ParseError(path + ".rect", "expected [x, y, w, h]");
        b.rect = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()};
        if (!(b.rect.w > 0) || !(b.rect.h > 0)) throw ParseError(path + ".rect", "width and height must be positive");
        b.rotation_deg = j.value("rot", 0.0);
        b.source = regularize::source_from_name(j.value("source", std::string("raw")));
        b.dormer = j.value("dormer", false);
        b.pitch = j.value("pitch", -1);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path, e.what());
    }
    return b;
}

inline nlohmann::json style_to_json(const style::BuildingStyle& s) {
    nlohmann::json j = nlohmann::json::object();
    for (auto p : style::kAllProperties) j[std::string(style::property_name(p))] = s.vectors[std::size_t(p)].values();
    j["set"] = s.set_index;
    return j;
}

} // namespace mdetail

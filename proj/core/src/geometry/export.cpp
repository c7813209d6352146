#include <cstdio>
#include <fstream>
#include <set>

#include "mdetail/geometry/geometry.hpp"

namespace mdetail::geometry {

namespace {

std::uint8_t part_material(const SubMesh& part) {
    if (auto l = label_from_name(part.label)) return material_id(*l);
    return material_id(Label::wall);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

void write_building(const std::filesystem::path& dir, const std::vector<Surface>& surfaces) {
    std::filesystem::create_directories(dir);
    std::ofstream obj(dir / "model.obj"), mtl(dir / "model.mtl");
    if (!obj || !mtl) throw Error("cannot write model files under " + dir.string());
    obj << "mtllib model.mtl\n";
    const auto mats = materials();
    std::size_t offset = 1;
    for (const auto& s : surfaces) {
        write_png(dir / ("tex_" + s.name + ".png"), s.texture);
        write_png(dir / ("nrm_" + s.name + ".png"), s.normals);
        write_png(dir / ("mat_" + s.name + ".png"), material_image(s.materials));

        std::set<std::uint8_t> used;
        for (const auto& part : s.mesh.parts) used.insert(part_material(part));
        for (std::uint8_t id : used) {
            const Material& m = mats[id];
            mtl << "newmtl " << s.name << '_' << m.name << '\n'
                << "Kd 1.000000 1.000000 1.000000\n"
                << "Ks " << fmt(m.reflectivity) << ' ' << fmt(m.reflectivity) << ' ' << fmt(m.reflectivity) << '\n'
                << "Ns " << fmt(1000.0 * m.glossiness) << '\n'
                << "map_Kd tex_" << s.name << ".png\n"
                << "norm nrm_" << s.name << ".png\n\n";
        }
        for (std::size_t k = 0; k < s.mesh.parts.size(); ++k) {
            const SubMesh& part = s.mesh.parts[k];
            obj << "o " << s.name << '_' << k << '_' << part.label << '\n';
            obj << "usemtl " << s.name << '_' << mats[part_material(part)].name << '\n';
            for (const Vec3& v : part.vertices) obj << "v " << fmt(v.x()) << ' ' << fmt(v.y()) << ' ' << fmt(v.z()) << '\n';
            for (const Vec2& t : part.uvs) obj << "vt " << fmt(t.x()) << ' ' << fmt(t.y()) << '\n';
            for (const auto& tri : part.triangles) {
                obj << 'f';
                for (int i : tri) obj << ' ' << offset + std::size_t(i) << '/' << offset + std::size_t(i);
                obj << '\n';
            }
            offset += part.vertices.size();
        }
    }
    std::ofstream json(dir / "materials.json");
    if (!json) throw Error("cannot write materials.json");
    json << materials_json() << '\n';
}

} // namespace mdetail::geometry

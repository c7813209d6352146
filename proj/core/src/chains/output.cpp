#include <fstream>

#include "../common/json_io.hpp"
#include "mdetail/chains/chains.hpp"

namespace mdetail::chains {

using nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

json frame_json(const scene::FacadeFrame& f) {
    return {{"origin", vec_json(f.origin)}, {"u", vec_json(f.u)},          {"v", vec_json(f.v)},
            {"width", f.width},             {"height", f.height},          {"pixels_per_meter", f.pixels_per_meter},
            {"cols", f.cols()},             {"rows", f.rows()}};
}

json boxes_json(const std::vector<regularize::DetailBox>& boxes) {
    json a = json::array();
    for (const auto& b : boxes) a.push_back(box_to_json(b));
    return a;
}

json timings_json(const std::vector<StageTiming>& timings) {
    json a = json::array();
    for (const auto& t : timings) a.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    return {{"stages", a}};
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace

void write_facade_result(const std::filesystem::path& dir, const FacadeChainResult& r, const style::BuildingStyle& style) {
    std::filesystem::create_directories(dir);
    write_png(dir / "mask.png", r.mask, true);
    write_png(dir / "windows.png", render_labels(r.window_labels));
    write_png(dir / "labels.png", render_labels(r.labels));
    write_png(dir / "coarse.png", r.coarse);
    write_png(dir / "hires.png", r.hires);
    json results = json::array();
    for (const auto& w : r.window_results) {
        const auto wdir = dir / "windows" / std::to_string(w.index);
        std::filesystem::create_directories(wdir);
        write_png(wdir / "panes.png", render_labels(w.panes));
        write_png(wdir / "texture.png", w.texture);
        results.push_back({{"index", w.index}, {"pixels_per_meter", w.pixels_per_meter},
                           {"cols", w.panes.width}, {"rows", w.panes.height}});
    }
    json meta{{"frame", frame_json(r.frame)},
              {"resolution", r.resolution},
              {"empty", r.empty},
              {"styles", style_to_json(style)},
              {"windows", boxes_json(r.windows)},
              {"details", boxes_json(r.details)},
              {"window_results", results},
              {"warnings", r.warnings}};
    write_json(dir / "meta.json", meta);
    write_json(dir / "timings.json", timings_json(r.timings));
}

void write_roof_result(const std::filesystem::path& dir, const RoofChainResult& r) {
    std::filesystem::create_directories(dir);
    write_png(dir / "coarse_labels.png", render_labels(r.coarse_labels));
    write_png(dir / "labels.png", render_labels(r.labels));
    write_png(dir / "coarse.png", r.coarse);
    write_png(dir / "hires.png", r.hires);
    json pitches = json::array();
    for (const auto& p : r.layout.pitches) {
        json outline = json::array();
        for (const Vec2& q : p.outline) outline.push_back({q.x(), q.y()});
        pitches.push_back({{"outline", outline}, {"gutter_angle_deg", p.gutter_angle_deg}, {"flat", p.flat}});
    }
    json dormers = json::array();
    for (const auto& d : r.layout.dormers) dormers.push_back({d.x, d.y, d.w, d.h});
    json meta{{"frame", frame_json(r.frame)},
              {"resolution", r.resolution},
              {"pitches", pitches},
              {"dormers", dormers},
              {"features", boxes_json(r.features)}};
    write_json(dir / "meta.json", meta);
    write_json(dir / "timings.json", timings_json(r.timings));
}

} // namespace mdetail::chains

#include <algorithm>
#include <cmath>

#include "internal.hpp"

namespace mdetail::chains {

using gan::Task;
using regularize::DetailBox;
using regularize::RasterGeometry;

namespace {

constexpr Rgb kSillHighlight{1.0f, 1.0f, 1.0f};

bool near_boundary(const Vec3& p, const Polygon3& poly, double tol) {
    for (std::size_t i = 0; i < poly.size(); ++i)
        if (point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]) <= tol) return true;
    return false;
}

Vec3 face_normal(const Polygon3& face) {
    // Newell's method tolerates slightly non-planar input.
    Vec3 n = Vec3::Zero();
    for (std::size_t i = 0; i < face.size(); ++i) {
        const Vec3& a = face[i];
        const Vec3& b = face[(i + 1) % face.size()];
        n += Vec3((a.y() - b.y()) * (a.z() + b.z()), (a.z() - b.z()) * (a.x() + b.x()), (a.x() - b.x()) * (a.y() + b.y()));
    }
    return n.norm() > 0 ? n.normalized() : n;
}

/// Labels painted in drawing order: details first, openings on top, only inside the mask.
LabelGrid paint_facade(const Image& mask, double ppm, const std::vector<DetailBox>& details,
                       const std::vector<DetailBox>& openings) {
    const RasterGeometry raster{mask.width(), mask.height(), ppm};
    LabelGrid base = detail::mask_labels(mask, Label::wall);
    LabelGrid painted = base;
    std::vector<DetailBox> ordered;
    for (Label l : {Label::ledge, Label::sill, Label::molding, Label::balcony})
        for (const auto& d : details)
            if (d.label == l) ordered.push_back(d);
    regularize::paint_boxes(painted, raster, ordered);
    regularize::paint_boxes(painted, raster, openings);
    for (std::size_t i = 0; i < base.labels.size(); ++i)
        if (mask.data()[i] != 0.0f) base.labels[i] = painted.labels[i];
    return base;
}

void texture_stage(FacadeChainResult& r, const style::BuildingStyle& style, NetworkSet& nets) {
    r.coarse = detail::run_stage("facade", "texture", r.timings, [&] {
        const auto net = nets.get(Task::facade_textures);
        Image out =
            detail::translate_on_canvas(*net, Task::facade_textures, render_labels(r.window_labels), r.mask,
                                        r.frame.pixels_per_meter, detail::style_for(Task::facade_textures, style));
        detail::clear_outside(out, r.mask);
        return out;
    });
}

void superres_stage(FacadeChainResult& r, const style::BuildingStyle& style, NetworkSet& nets,
                    const ChainOptions& options) {
    r.hires = detail::run_stage("facade", "super-resolution", r.timings, [&] {
        const Image augmented =
            augment_labels(r.coarse, r.labels, Label::sill, kSillHighlight, options.label_augment_alpha);
        const int cols = r.frame.cols(), rows = r.frame.rows();
        if (std::min(cols, rows) < 8) {
            r.warnings.push_back("facade raster " + std::to_string(cols) + "x" + std::to_string(rows) +
                                 " too thin for super-resolution; upsampled only");
            return resize_bilinear(augmented, 2 * cols, 2 * rows);
        }
        const auto net = nets.get(Task::facade_superres);
        Image out = run_super_resolution(augmented, detail::style_for(Task::facade_superres, style), *net,
                                         options.superres_overlap);
        detail::clear_outside(out, resize_nearest(r.mask, 2 * cols, 2 * rows));
        return out;
    });
}

} // namespace

std::vector<Polygon2> project_roof_onto_facade(const scene::Building& building, std::size_t facade_index) {
    if (facade_index >= building.facades.size()) throw Error("project_roof_onto_facade: facade index out of range");
    const scene::Facade& facade = building.facades[facade_index];
    const scene::FacadeFrame own = scene::facade_frame(facade, 1);
    Vec3 fn = facade.normal;
    fn -= fn.dot(facade.up.normalized()) * facade.up.normalized();
    std::vector<Polygon2> out;
    for (std::size_t f = 0; f < building.roof.faces.size(); ++f) {
        const Polygon3& face = building.roof.faces[f];
        if (face.size() < 3) continue;
        if (f < building.roof.flat.size() && building.roof.flat[f]) continue;
        Vec3 n = face_normal(face);
        if (n.dot(facade.up) < 0) n = -n;
        Vec3 horizontal = n - n.dot(facade.up.normalized()) * facade.up.normalized();
        if (horizontal.norm() < 1e-9) continue;
        if (horizontal.normalized().dot(fn.normalized()) < -1e-6) continue;
        const bool adjacent = std::any_of(face.begin(), face.end(),
                                          [&](const Vec3& p) { return near_boundary(p, facade.polygon, 1e-3); });
        if (!adjacent) continue;
        Polygon2 poly;
        for (const Vec3& p : face) poly.push_back(own.to_frame(p));
        if (std::abs(signed_area(poly)) < 1e-6) continue;
        out.push_back(std::move(poly));
    }
    return out;
}

FacadeChainResult run_facade_chain(const scene::Facade& facade, const std::vector<Polygon2>& roof_projection,
                                   const style::BuildingStyle& style, NetworkSet& nets, const ChainOptions& options) {
    FacadeChainResult r;
    const auto window_net = nets.get(Task::facade_window_labels);
    const int R = window_net->resolution();
    r.resolution = R;
    r.frame = scene::facade_frame(facade, R, roof_projection);
    const double ppm = r.frame.pixels_per_meter;
    const int cols = r.frame.cols(), rows = r.frame.rows();
    r.mask = detail::run_stage("facade", "mask", r.timings,
                               [&] { return scene::rasterize_facade_mask(facade, r.frame, roof_projection); });

    const bool any = std::any_of(r.mask.data().begin(), r.mask.data().end(), [](float v) { return v != 0.0f; });
    if (!any) {
        r.empty = true;
        r.window_labels = LabelGrid(cols, rows, Label::background);
        r.labels = r.window_labels;
        r.coarse = detail::background_canvas(cols, rows);
        r.hires = detail::background_canvas(2 * cols, 2 * rows);
        r.warnings.push_back("facade fully occluded");
        return r;
    }

    // Projected roof polygons in the (possibly extended) frame, for dormer tagging.
    const scene::FacadeFrame own = scene::facade_frame(facade, 1);
    std::vector<Polygon2> roof_region;
    for (const auto& poly : roof_projection) {
        Polygon2 p;
        for (const Vec2& q : poly) p.push_back(r.frame.to_frame(own.to_world(q)));
        roof_region.push_back(std::move(p));
    }
    const Polygon2 outline = scene::project_polygon(facade.polygon, r.frame);

    r.windows = detail::run_stage("facade", "window-labels", r.timings, [&] {
        const Image content = render_labels(detail::mask_labels(r.mask, Label::wall));
        const Image out = detail::translate_on_canvas(*window_net, Task::facade_window_labels, content, r.mask, ppm,
                                                      detail::style_for(Task::facade_window_labels, style));
        const LabelGrid raw = quantize_masked(out, label_sets::kFacadeWindows, r.mask, Label::wall);
        auto boxes = detail::clip_to_frame(regularize::regularize_facade_windows(raw, ppm, options.windows),
                                           r.frame.width, r.frame.height);
        for (auto& b : boxes) {
            const Vec2 c = b.rect.center();
            b.dormer = !point_in_polygon(c, outline) &&
                       std::any_of(roof_region.begin(), roof_region.end(),
                                   [&](const Polygon2& p) { return point_in_polygon(c, p); });
        }
        return boxes;
    });
    r.window_labels = paint_facade(r.mask, ppm, {}, r.windows);

    texture_stage(r, style, nets);

    r.details = detail::run_stage("facade", "full-labels", r.timings, [&] {
        const auto net = nets.get(Task::facade_full_labels);
        const Image windows = render_labels(r.window_labels);
        const Image* parts[] = {&r.coarse, &windows};
        const Image out = detail::translate_on_canvas(*net, Task::facade_full_labels, concat_channels(parts), r.mask,
                                                      ppm, style::StyleVector());
        const LabelGrid raw = quantize_masked(out, label_sets::kFacadeFull, r.mask, Label::wall);
        return detail::clip_to_frame(regularize::regularize_facade_details(raw, ppm, r.windows, options.details),
                                     r.frame.width, r.frame.height);
    });
    r.labels = paint_facade(r.mask, ppm, r.details, r.windows);

    superres_stage(r, style, nets, options);
    return r;
}

void apply_facade_boxes(FacadeChainResult& r, const std::vector<DetailBox>& windows,
                        const std::vector<DetailBox>& details, const style::BuildingStyle& style, NetworkSet& nets,
                        const ChainOptions& options) {
    if (r.empty) throw Error("facade is fully occluded; it has no labels to edit");
    const double eps = 1e-6;
    auto check = [&](const std::vector<DetailBox>& boxes, const char* name, bool opening) {
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            const auto& b = boxes[i];
            const std::string path = std::string(name) + "[" + std::to_string(i) + "]";
            const bool is_opening = b.label == Label::window || b.label == Label::door;
            if (opening != is_opening) throw ValidationError(path + ".label", "label not allowed here");
            if (b.rect.w <= 0 || b.rect.h <= 0) throw ValidationError(path + ".rect", "empty box");
            if (b.rect.x < -eps || b.rect.y < -eps || b.rect.right() > r.frame.width + eps ||
                b.rect.top() > r.frame.height + eps)
                throw ValidationError(path + ".rect", "box lies outside the facade frame");
        }
    };
    check(windows, "windows", true);
    check(details, "details", false);

    r.windows = windows;
    r.details = details;
    r.timings.clear();
    r.window_labels = paint_facade(r.mask, r.frame.pixels_per_meter, {}, r.windows);
    texture_stage(r, style, nets);
    r.labels = paint_facade(r.mask, r.frame.pixels_per_meter, r.details, r.windows);
    superres_stage(r, style, nets, options);

    // Window results follow their boxes; the merge resamples them into the new rectangles.
    std::erase_if(r.window_results, [&](const WindowResult& w) {
        return w.index < 0 || std::size_t(w.index) >= r.windows.size() || r.windows[std::size_t(w.index)].label != Label::window;
    });
    for (auto& w : r.window_results) w.box = r.windows[std::size_t(w.index)];
}

} // namespace mdetail::chains

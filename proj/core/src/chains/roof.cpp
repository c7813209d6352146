#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "mdetail/synth/synth.hpp"

namespace mdetail::chains {

using gan::Task;

namespace {

constexpr Rgb kCrestColor{-0.7f, -0.7f, -0.7f};

Vec3 upward_normal(const Polygon3& face) {
    Vec3 n = Vec3::Zero();
    for (std::size_t i = 0; i < face.size(); ++i) {
        const Vec3& a = face[i];
        const Vec3& b = face[(i + 1) % face.size()];
        n += Vec3((a.y() - b.y()) * (a.z() + b.z()), (a.z() - b.z()) * (a.x() + b.x()), (a.x() - b.x()) * (a.y() + b.y()));
    }
    if (n.norm() == 0) return Vec3::UnitZ();
    n.normalize();
    return n.z() < 0 ? Vec3(-n) : n;
}

bool is_flat(const scene::Roof& roof, std::size_t f) {
    if (f < roof.flat.size() && roof.flat[f]) return true;
    return upward_normal(roof.faces[f]).head<2>().norm() < 1e-9;
}

Polygon2 top_down(const Polygon3& face, const scene::FacadeFrame& frame) {
    Polygon2 out;
    for (const Vec3& p : face) out.push_back(frame.to_frame(p));
    return out;
}

} // namespace

LabelGrid coarse_roof_labels(const scene::Roof& roof, const scene::FacadeFrame& frame) {
    const int cols = frame.cols(), rows = frame.rows();
    LabelGrid g(cols, rows, Label::background);
    std::vector<Polygon2> faces;
    for (const auto& f : roof.faces) faces.push_back(top_down(f, frame));
    const double half_stroke = std::max(0.5 * synth::kRidgeStroke, 0.5 / frame.pixels_per_meter + 1e-9);
    auto seg2 = [&](const Segment3& s) { return std::pair{frame.to_frame(s.a), frame.to_frame(s.b)}; };
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x) {
            const Vec2 p = frame.pixel_center(x, y);
            for (std::size_t f = 0; f < faces.size(); ++f)
                if (point_in_polygon(p, faces[f])) {
                    g.at(x, y) = is_flat(roof, f) ? Label::flat_roof : Label::roof;
                    break;
                }
            if (g.at(x, y) == Label::background) continue;
            for (const auto& s : roof.valleys) {
                const auto [a, b] = seg2(s);
                if (point_segment_distance(p, a, b) <= half_stroke) g.at(x, y) = Label::valley;
            }
            for (const auto& s : roof.ridges) {
                const auto [a, b] = seg2(s);
                if (point_segment_distance(p, a, b) <= half_stroke) g.at(x, y) = Label::ridge;
            }
        }
    return g;
}

regularize::RoofLayout roof_layout(const scene::Roof& roof, const scene::FacadeFrame& frame) {
    regularize::RoofLayout layout;
    for (std::size_t f = 0; f < roof.faces.size(); ++f) {
        regularize::RoofPitch pitch;
        pitch.outline = top_down(roof.faces[f], frame);
        pitch.flat = is_flat(roof, f);
        if (!pitch.flat) {
            // The horizontal part of the upward normal points downslope.
            const Vec2 d = upward_normal(roof.faces[f]).head<2>().normalized();
            double a = std::atan2(d.x(), -d.y()) * 180.0 / M_PI;
            if (a < 0) a += 360.0;
            pitch.gutter_angle_deg = a;
        }
        layout.pitches.push_back(std::move(pitch));
    }
    return layout;
}

std::vector<Rect> dormer_footprints(const scene::Building& building, std::size_t facade_index,
                                    const FacadeChainResult& facade, const scene::FacadeFrame& roof_frame) {
    if (facade_index >= building.facades.size()) throw Error("dormer_footprints: facade index out of range");
    const scene::Facade& f = building.facades[facade_index];
    const Vec3 up = f.up.normalized();
    Vec3 inward = -(f.normal - f.normal.dot(up) * up);
    if (inward.norm() < 1e-9) return {};
    inward.normalize();
    const auto& faces = building.roof.faces;

    auto hit = [&](const Vec3& p) -> std::optional<Vec3> {
        std::optional<Vec3> best;
        double best_t = 0;
        for (std::size_t k = 0; k < faces.size(); ++k) {
            if (faces[k].size() < 3) continue;
            const Vec3 n = upward_normal(faces[k]);
            const double denom = n.dot(inward);
            if (std::abs(denom) < 1e-9) continue;
            const double t = n.dot(faces[k][0] - p) / denom;
            if (t < -1e-6) continue;
            const Vec3 h = p + t * inward;
            Polygon2 xy;
            for (const Vec3& q : faces[k]) xy.push_back(q.head<2>());
            if (!point_in_polygon(h.head<2>(), xy)) continue;
            if (!best || t < best_t) {
                best = h;
                best_t = t;
            }
        }
        return best;
    };

    std::vector<Rect> out;
    for (const auto& w : facade.windows) {
        if (!w.dormer) continue;
        const Rect& r = w.rect;
        Polygon2 pts;
        for (const Vec2& c : {Vec2(r.x, r.y), Vec2(r.right(), r.y), Vec2(r.right(), r.top()), Vec2(r.x, r.top())}) {
            const Vec3 world = facade.frame.to_world(c);
            pts.push_back(roof_frame.to_frame(world));
            if (auto h = hit(world)) pts.push_back(roof_frame.to_frame(*h));
        }
        const Rect box = bounding_rect(pts);
        if (box.w > 0 && box.h > 0) out.push_back(box);
    }
    return out;
}

RoofChainResult run_roof_chain(const scene::Roof& roof, const std::vector<Rect>& dormers,
                               const style::BuildingStyle& style, NetworkSet& nets, const ChainOptions& options) {
    RoofChainResult r;
    const auto label_net = nets.get(Task::roof_labels);
    const int R = label_net->resolution();
    r.resolution = R;
    r.frame = scene::roof_frame(roof, R);
    const double ppm = r.frame.pixels_per_meter;
    const int cols = r.frame.cols(), rows = r.frame.rows();
    r.coarse_labels = detail::run_stage("roof", "coarse-labels", r.timings, [&] { return coarse_roof_labels(roof, r.frame); });
    Image mask(cols, rows, 1, 0.0f);
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x) mask.at(x, y) = r.coarse_labels.at(x, y) != Label::background ? 1.0f : 0.0f;
    r.layout = roof_layout(roof, r.frame);
    r.layout.dormers = dormers;

    r.features = detail::run_stage("roof", "detail-labels", r.timings, [&] {
        const Image out = detail::translate_on_canvas(*label_net, Task::roof_labels, render_labels(r.coarse_labels), mask,
                                                      ppm, detail::style_for(Task::roof_labels, style));
        const LabelGrid raw = quantize_masked(out, label_sets::kRoofDetails, mask, Label::roof);
        return detail::clip_to_frame(regularize::regularize_roof_labels(raw, ppm, r.layout, options.roof),
                                     r.frame.width, r.frame.height);
    });
    {
        LabelGrid painted = r.coarse_labels;
        regularize::paint_boxes(painted, regularize::RasterGeometry{cols, rows, ppm}, r.features);
        r.labels = r.coarse_labels;
        for (std::size_t i = 0; i < painted.labels.size(); ++i)
            if (mask.data()[i] != 0.0f) r.labels.labels[i] = painted.labels[i];
    }

    r.coarse = detail::run_stage("roof", "texture", r.timings, [&] {
        const auto net = nets.get(Task::roof_textures);
        Image out = detail::translate_on_canvas(*net, Task::roof_textures, render_labels(r.labels), mask, ppm,
                                                detail::style_for(Task::roof_textures, style));
        detail::clear_outside(out, mask);
        return out;
    });

    r.hires = detail::run_stage("roof", "super-resolution", r.timings, [&] {
        const Image augmented = augment_labels(r.coarse, r.labels, Label::ridge, kCrestColor, options.label_augment_alpha);
        if (std::min(cols, rows) < 8) return resize_bilinear(augmented, 2 * cols, 2 * rows);
        const auto net = nets.get(Task::roof_superres);
        Image out = run_super_resolution(augmented, detail::style_for(Task::roof_superres, style), *net,
                                         options.superres_overlap);
        detail::clear_outside(out, resize_nearest(mask, 2 * cols, 2 * rows));
        return out;
    });
    return r;
}

} // namespace mdetail::chains

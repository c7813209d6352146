#include <algorithm>
#include <cmath>

#include "color.hpp"
#include "mdetail/synth/synth.hpp"

namespace mdetail::synth {

using regularize::DetailBox;
using regularize::RasterGeometry;
using regularize::RoofPitch;

namespace {

double wrap_degrees(double a) {
    a = std::fmod(a, 360.0);
    return a < 0 ? a + 360.0 : a;
}

bool rect_inside(const Rect& r, const Polygon2& poly, double margin) {
    const Rect g{r.x - margin, r.y - margin, r.w + 2 * margin, r.h + 2 * margin};
    for (const Vec2& c : {Vec2(g.x, g.y), Vec2(g.right(), g.y), Vec2(g.right(), g.top()), Vec2(g.x, g.top())})
        if (!point_in_polygon(c, poly)) return false;
    return true;
}

bool clear_of(const Rect& r, const std::vector<DetailBox>& others, double margin) {
    const Rect g{r.x - margin, r.y - margin, r.w + 2 * margin, r.h + 2 * margin};
    for (const auto& o : others)
        if (g.overlaps(o.rect)) return false;
    return true;
}

DetailBox feature(Label label, const Rect& r, const RoofPitch& pitch, int index) {
    DetailBox b;
    b.label = label;
    b.rect = r;
    b.rotation_deg = pitch.gutter_angle_deg;
    b.pitch = index;
    return b;
}

/// Mirrors the layout across the diagonal x = y.
void transpose(RoofLayoutSynth& roof) {
    std::swap(roof.width, roof.depth);
    auto swap_xy = [](Vec2 v) { return Vec2(v.y(), v.x()); };
    for (auto& [a, b] : roof.ridges) {
        a = swap_xy(a);
        b = swap_xy(b);
    }
    for (auto& p : roof.pitches.pitches) {
        for (auto& v : p.outline) v = swap_xy(v);
        std::reverse(p.outline.begin(), p.outline.end());
        p.gutter_angle_deg = wrap_degrees(270.0 - p.gutter_angle_deg);
    }
    for (auto& f : roof.features) {
        f.rect = {f.rect.y, f.rect.x, f.rect.h, f.rect.w};
        f.rotation_deg = wrap_degrees(270.0 - f.rotation_deg);
    }
}

} // namespace

RoofLayoutSynth random_roof(Rng& rng, const Knobs&) {
    RoofLayoutSynth roof;
    const double u = uniform(rng, 0, 1);
    roof.kind = u < 0.3 ? RoofKind::flat : (u < 0.75 ? RoofKind::gable : RoofKind::hip);
    roof.depth = uniform(rng, 6.0, 12.0);
    roof.width = std::max(uniform(rng, 7.0, 18.0), roof.kind == RoofKind::hip ? roof.depth + 2.5 : roof.depth);
    const double W = roof.width, D = roof.depth, r = 0.5 * D;
    auto& pitches = roof.pitches.pitches;

    double ridge_x0 = 0, ridge_x1 = W;
    switch (roof.kind) {
    case RoofKind::flat:
        pitches.push_back({{{0, 0}, {W, 0}, {W, D}, {0, D}}, 0.0, true});
        break;
    case RoofKind::gable:
        roof.ridges.push_back({{0, r}, {W, r}});
        pitches.push_back({{{0, 0}, {W, 0}, {W, r}, {0, r}}, 0.0, false});
        pitches.push_back({{{0, r}, {W, r}, {W, D}, {0, D}}, 180.0, false});
        break;
    case RoofKind::hip:
        ridge_x0 = r;
        ridge_x1 = W - r;
        roof.ridges.push_back({{r, r}, {W - r, r}});
        roof.ridges.push_back({{0, 0}, {r, r}});
        roof.ridges.push_back({{W, 0}, {W - r, r}});
        roof.ridges.push_back({{0, D}, {r, r}});
        roof.ridges.push_back({{W, D}, {W - r, r}});
        pitches.push_back({{{0, 0}, {W, 0}, {W - r, r}, {r, r}}, 0.0, false});
        pitches.push_back({{{r, r}, {W - r, r}, {W, D}, {0, D}}, 180.0, false});
        pitches.push_back({{{0, 0}, {r, r}, {0, D}}, 270.0, false});
        pitches.push_back({{{W, 0}, {W, D}, {W - r, r}}, 90.0, false});
        break;
    }

    // Chimneys: next to the ridge on pitched roofs, anywhere on flat ones.
    const int chimneys = roof.kind == RoofKind::flat ? uniform_int(rng, 0, 2) : uniform_int(rng, 1, 2);
    for (int c = 0, attempts = 0; c < chimneys && attempts < 40; ++attempts) {
        const double s = uniform(rng, 0.6, 1.1);
        Rect rect;
        int pitch = 0;
        if (roof.kind == RoofKind::flat) {
            rect = {uniform(rng, 0.5, W - s - 0.5), uniform(rng, 0.5, D - s - 0.5), s, s};
        } else {
            const double lo = ridge_x0 + s, hi = ridge_x1 - s;
            if (hi <= lo) break;
            const double cx = uniform(rng, lo, hi);
            const double offset = uniform(rng, 0.5 * s + 0.05, 1.0);
            const bool upper = chance(rng, 0.5);
            pitch = upper ? 1 : 0;
            const double cy = upper ? r + offset : r - offset;
            rect = {cx - 0.5 * s, cy - 0.5 * s, s, s};
        }
        if (!rect_inside(rect, pitches[std::size_t(pitch)].outline, 0.0) || !clear_of(rect, roof.features, 0.3))
            continue;
        roof.features.push_back(feature(Label::chimney, rect, pitches[std::size_t(pitch)], pitch));
        ++c;
    }

    if (roof.kind != RoofKind::flat) {
        const int windows = uniform_int(rng, 0, 3);
        for (int w = 0, attempts = 0; w < windows && attempts < 40; ++attempts) {
            const int pitch = uniform_int(rng, 0, 1);
            const double ww = uniform(rng, 0.6, 1.0), wh = uniform(rng, 0.8, 1.3);
            const Rect rect{uniform(rng, 0.0, W - ww), uniform(rng, pitch ? r : 0.0, (pitch ? D : r) - wh), ww, wh};
            if (!rect_inside(rect, pitches[std::size_t(pitch)].outline, 0.3) || !clear_of(rect, roof.features, 0.3))
                continue;
            roof.features.push_back(feature(Label::roof_window, rect, pitches[std::size_t(pitch)], pitch));
            ++w;
        }
    }

    const double hue = chance(rng, 0.6) ? uniform(rng, -0.03, 0.08) : uniform(rng, 0.0, 1.0);
    const double sat = chance(rng, 0.3) ? uniform(rng, 0.0, 0.1) : uniform(rng, 0.3, 0.7);
    roof.tile = hsv(hue, sat, uniform(rng, 0.25, 0.6));
    roof.chimney = hsv(uniform(rng, 0.0, 0.06), uniform(rng, 0.4, 0.6), uniform(rng, 0.35, 0.55));
    roof.glass = hsv(uniform(rng, 0.55, 0.65), uniform(rng, 0.2, 0.5), uniform(rng, 0.1, 0.3));

    if (chance(rng, 0.5)) transpose(roof);
    return roof;
}

RoofRasters render_roof(const RoofLayoutSynth& roof, int resolution, Rng& rng, double noise) {
    RoofRasters r;
    r.pixels_per_meter = resolution / std::max(roof.width, roof.depth);
    const RasterGeometry raster{resolution, resolution, r.pixels_per_meter};
    const double half_stroke = std::max(0.5 * kRidgeStroke, 0.5 / r.pixels_per_meter + 1e-9);
    const Rect footprint{0, 0, roof.width, roof.depth};
    const bool flat = roof.kind == RoofKind::flat;

    r.coarse = LabelGrid(resolution, resolution, Label::background);
    std::vector<int> pitch_of(std::size_t(resolution) * std::size_t(resolution), -1);
    for (int y = 0; y < resolution; ++y)
        for (int x = 0; x < resolution; ++x) {
            const Vec2 p = raster.pixel_center(x, y);
            if (!footprint.contains(p)) continue;
            r.coarse.at(x, y) = flat ? Label::flat_roof : Label::roof;
            for (std::size_t k = 0; k < roof.pitches.pitches.size(); ++k)
                if (point_in_polygon(p, roof.pitches.pitches[k].outline)) pitch_of[std::size_t(y * resolution + x)] = int(k);
            for (const auto& [a, b] : roof.ridges)
                if (point_segment_distance(p, a, b) <= half_stroke) r.coarse.at(x, y) = Label::ridge;
        }
    r.details = r.coarse;
    regularize::paint_boxes(r.details, raster, roof.features);

    r.texture = Image(resolution, resolution, 3);
    const Rgb bg = label_color(Label::background);
    for (int y = 0; y < resolution; ++y)
        for (int x = 0; x < resolution; ++x) {
            const Vec2 p = raster.pixel_center(x, y);
            const double n = noise * normal(rng);
            switch (r.details.at(x, y)) {
            case Label::background: put(r.texture, x, y, bg, 0.0); break;
            case Label::flat_roof: put(r.texture, x, y, roof.tile, 2.0 * n); break;
            case Label::roof: {
                // shingle courses run parallel to the gutter
                const int k = pitch_of[std::size_t(y * resolution + x)];
                const double angle = k >= 0 ? roof.pitches.pitches[std::size_t(k)].gutter_angle_deg * M_PI / 180.0 : 0.0;
                const double along_slope = -std::sin(angle) * p.x() + std::cos(angle) * p.y();
                const double course = along_slope / 0.35 - std::floor(along_slope / 0.35);
                put(r.texture, x, y, roof.tile, (course < 0.2 ? -0.12 : 0.0) + n);
                break;
            }
            case Label::ridge:
            case Label::valley: put(r.texture, x, y, shade(roof.tile, -0.2), n); break;
            case Label::chimney: put(r.texture, x, y, roof.chimney, n); break;
            case Label::roof_window: put(r.texture, x, y, roof.glass, 0.5 * n); break;
            default: put(r.texture, x, y, roof.tile, n); break;
            }
        }
    return r;
}

} // namespace mdetail::synth

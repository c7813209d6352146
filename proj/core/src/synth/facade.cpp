#include <algorithm>
#include <cmath>

#include "color.hpp"
#include "mdetail/synth/synth.hpp"

namespace mdetail::synth {

using regularize::DetailBox;
using regularize::RasterGeometry;

namespace {

DetailBox box(Label label, double x, double y, double w, double h) {
    DetailBox b;
    b.label = label;
    b.rect = {x, y, w, h};
    return b;
}

} // namespace

FacadeLayout random_facade(Rng& rng, const Knobs& knobs) {
    FacadeLayout f;
    f.floors = uniform_int(rng, knobs.floors_min, knobs.floors_max);
    f.floor_height = uniform(rng, knobs.floor_height_min, knobs.floor_height_max);
    const int cols = uniform_int(rng, knobs.window_columns_min, knobs.window_columns_max);
    const double sill_base = uniform(rng, 0.7, 0.95);
    const double ww = uniform(rng, 0.8, 1.5);
    const double wh = uniform(rng, 1.0, f.floor_height - sill_base - 0.5);
    const double spacing = uniform(rng, 0.8, 2.2);
    const double margin = uniform(rng, 0.6, 1.5);
    f.width = 2 * margin + cols * ww + (cols - 1) * spacing;
    const double body = f.floors * f.floor_height;
    f.height = body;
    f.outline = {{0, 0}, {f.width, 0}, {f.width, body}};
    if (chance(rng, 0.25)) {
        const double gable = uniform(rng, 1.5, std::max(1.6, 0.35 * f.width));
        f.outline.push_back({0.5 * f.width, body + gable});
        f.height = body + gable;
    }
    f.outline.push_back({0, body});

    const int door_col = uniform_int(rng, 0, cols - 1);
    const double door_w = std::min(uniform(rng, 1.0, 1.6), ww + 0.8 * spacing);
    const double door_h = std::min(uniform(rng, 2.1, 2.5), f.floor_height - 0.3);

    const bool sills = chance(rng, 0.6);
    const bool moldings = chance(rng, 0.4);
    const bool ledges = chance(rng, 0.5);
    const bool balconies = chance(rng, 0.25);
    const double sill_h = uniform(rng, 0.08, 0.18);
    const double molding_h = uniform(rng, 0.15, 0.3);
    const double ledge_h = uniform(rng, 0.15, 0.25);
    const double balcony_h = std::min(uniform(rng, 0.9, 1.1), sill_base - 0.15);

    for (int fl = 0; fl < f.floors; ++fl) {
        const bool balcony_floor = balconies && fl > 0 && chance(rng, 0.5);
        for (int c = 0; c < cols; ++c) {
            const double cx = margin + c * (ww + spacing) + 0.5 * ww;
            if (fl == 0 && c == door_col) {
                f.openings.push_back(box(Label::door, cx - 0.5 * door_w, 0.0, door_w, door_h));
                if (moldings) f.details.push_back(box(Label::molding, cx - 0.5 * door_w - 0.05, door_h, door_w + 0.1, molding_h));
                continue;
            }
            const double y = fl * f.floor_height + sill_base;
            f.openings.push_back(box(Label::window, cx - 0.5 * ww, y, ww, wh));
            if (balcony_floor)
                f.details.push_back(box(Label::balcony, cx - 0.5 * ww - 0.3, y - balcony_h, ww + 0.6, balcony_h));
            else if (sills)
                f.details.push_back(box(Label::sill, cx - 0.5 * ww - 0.1, y - sill_h, ww + 0.2, sill_h));
            if (moldings) f.details.push_back(box(Label::molding, cx - 0.5 * ww - 0.05, y + wh, ww + 0.1, molding_h));
        }
    }
    if (ledges)
        for (int fl = 1; fl < f.floors; ++fl)
            f.details.push_back(box(Label::ledge, 0.0, fl * f.floor_height - 0.5 * ledge_h, f.width, ledge_h));

    if (chance(rng, 0.15)) {
        const double ow = uniform(rng, 1.0, 0.3 * f.width);
        const double oh = uniform(rng, 0.3 * body, 0.8 * body);
        f.occluders.push_back(chance(rng, 0.5) ? Rect{0, 0, ow, oh} : Rect{f.width - ow, 0, ow, oh});
    }

    f.colors.wall = hsv(uniform(rng, 0, 1), uniform(rng, knobs.wall_saturation_min, knobs.wall_saturation_max),
                        uniform(rng, knobs.wall_value_min, knobs.wall_value_max));
    f.colors.glass = hsv(uniform(rng, 0.55, 0.65), uniform(rng, 0.2, 0.5), uniform(rng, 0.1, 0.35));
    f.colors.door = hsv(uniform(rng, 0.02, 0.1), uniform(rng, 0.4, 0.7), uniform(rng, 0.2, 0.5));
    f.colors.trim = chance(rng, 0.5) ? hsv(uniform(rng, 0, 1), uniform(rng, 0, 0.1), uniform(rng, 0.85, 0.95))
                                     : shade(f.colors.wall, -0.3);
    f.colors.balcony = hsv(uniform(rng, 0, 1), uniform(rng, 0, 0.2), uniform(rng, 0.15, 0.3));
    return f;
}

FacadeRasters render_facade(const FacadeLayout& f, int resolution, Rng& rng, double noise) {
    FacadeRasters r;
    r.pixels_per_meter = resolution / std::max(f.width, f.height);
    const RasterGeometry raster{resolution, resolution, r.pixels_per_meter};
    r.mask = Image(resolution, resolution, 1, 0.0f);
    r.window_labels = LabelGrid(resolution, resolution, Label::background);
    for (int y = 0; y < resolution; ++y)
        for (int x = 0; x < resolution; ++x) {
            const Vec2 p = raster.pixel_center(x, y);
            if (!point_in_polygon(p, f.outline)) continue;
            bool occluded = false;
            for (const auto& o : f.occluders) occluded = occluded || o.contains(p);
            if (occluded) continue;
            r.mask.at(x, y) = 1.0f;
            r.window_labels.at(x, y) = Label::wall;
        }

    auto masked_paint = [&](LabelGrid& grid, const std::vector<DetailBox>& boxes) {
        LabelGrid painted = grid;
        regularize::paint_boxes(painted, raster, boxes);
        for (std::size_t i = 0; i < grid.labels.size(); ++i)
            if (r.mask.data()[i] != 0.0f) grid.labels[i] = painted.labels[i];
    };
    r.full_labels = r.window_labels;
    std::vector<DetailBox> ordered;
    for (Label l : {Label::ledge, Label::sill, Label::molding, Label::balcony})
        for (const auto& d : f.details)
            if (d.label == l) ordered.push_back(d);
    masked_paint(r.full_labels, ordered);
    masked_paint(r.full_labels, f.openings);
    masked_paint(r.window_labels, f.openings);

    r.texture = Image(resolution, resolution, 3);
    const Rgb bg = label_color(Label::background);
    for (int y = 0; y < resolution; ++y)
        for (int x = 0; x < resolution; ++x) {
            const Vec2 p = raster.pixel_center(x, y);
            const double n = noise * normal(rng);
            switch (r.full_labels.at(x, y)) {
            case Label::background: put(r.texture, x, y, bg, 0.0); break;
            case Label::wall: put(r.texture, x, y, f.colors.wall, 0.08 * (p.y() / f.height - 0.5) + n); break;
            case Label::window: {
                // brighter towards the top of each pane, as if reflecting sky
                double rel = 0;
                for (const auto& o : f.openings)
                    if (o.rect.contains(p)) rel = (p.y() - o.rect.y) / o.rect.h;
                put(r.texture, x, y, f.colors.glass, 0.15 * rel + 0.5 * n);
                break;
            }
            case Label::door: put(r.texture, x, y, f.colors.door, n); break;
            case Label::balcony: put(r.texture, x, y, f.colors.balcony, n); break;
            default: put(r.texture, x, y, f.colors.trim, n); break;
            }
        }
    return r;
}

} // namespace mdetail::synth

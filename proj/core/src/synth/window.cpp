#include <algorithm>
#include <cmath>

#include "color.hpp"
#include "mdetail/synth/synth.hpp"

namespace mdetail::synth {

namespace {

/// Splits [lo, hi) into `n` equal intervals separated by `gap`.
std::vector<std::pair<double, double>> split(double lo, double hi, int n, double gap) {
    std::vector<std::pair<double, double>> out;
    const double size = (hi - lo - (n - 1) * gap) / n;
    for (int i = 0; i < n; ++i) {
        const double a = lo + i * (size + gap);
        out.push_back({a, a + size});
    }
    return out;
}

} // namespace

WindowLayout random_window(Rng& rng, const Knobs& knobs) {
    WindowLayout w;
    const int cols = uniform_int(rng, knobs.pane_columns_min, knobs.pane_columns_max);
    const int rows = uniform_int(rng, knobs.pane_rows_min, knobs.pane_rows_max);
    const double frame = uniform(rng, 0.05, 0.1);
    const double mullion = uniform(rng, 0.03, 0.06);
    // keep at least 60% glass along each axis so the pane grid stays visible
    const double min_w = (2 * frame + (cols - 1) * mullion) / 0.4;
    const double min_h = (2 * frame + (rows - 1) * mullion) / 0.4;
    w.width = std::max(uniform(rng, 0.6, 1.8), min_w);
    w.height = std::max(uniform(rng, 0.8, 2.4), min_h);
    w.pane_columns = split(frame, w.width - frame, cols, mullion);
    w.pane_rows = split(frame, w.height - frame, rows, mullion);

    const double u = uniform(rng, 0, 1);
    if (u < 0.4)
        w.frame = hsv(uniform(rng, 0, 1), uniform(rng, 0, 0.08), uniform(rng, 0.85, 0.97));
    else if (u < 0.7)
        w.frame = hsv(uniform(rng, 0.03, 0.1), uniform(rng, 0.4, 0.7), uniform(rng, 0.25, 0.5));
    else
        w.frame = hsv(uniform(rng, 0, 1), uniform(rng, 0, 0.6), uniform(rng, 0.1, 0.6));
    w.glass = hsv(uniform(rng, 0.5, 0.68), uniform(rng, 0.15, 0.5), uniform(rng, 0.1, 0.4));
    return w;
}

WindowRasters render_window(const WindowLayout& w, int resolution, Rng& rng, double noise) {
    WindowRasters r;
    r.pixels_per_meter = resolution / std::max(w.width, w.height);
    const regularize::RasterGeometry raster{resolution, resolution, r.pixels_per_meter};
    const Rect outline{0, 0, w.width, w.height};
    r.mask_labels = LabelGrid(resolution, resolution, Label::background);
    r.texture = Image(resolution, resolution, 3);
    for (int y = 0; y < resolution; ++y)
        for (int x = 0; x < resolution; ++x) {
            const Vec2 p = raster.pixel_center(x, y);
            if (outline.contains(p)) r.mask_labels.at(x, y) = Label::window;
        }
    r.pane_labels = r.mask_labels;
    // separable by construction: a pixel is glass iff its column and row both are
    std::vector<char> col_in(std::size_t(resolution), 0), row_in(std::size_t(resolution), 0);
    for (int x = 0; x < resolution; ++x) {
        const double px = raster.pixel_center(x, 0).x();
        for (const auto& [a, b] : w.pane_columns) col_in[std::size_t(x)] |= px >= a && px < b;
    }
    for (int y = 0; y < resolution; ++y) {
        const double py = raster.pixel_center(0, y).y();
        for (const auto& [a, b] : w.pane_rows) row_in[std::size_t(y)] |= py >= a && py < b;
    }
    const Rgb bg = label_color(Label::background);
    for (int y = 0; y < resolution; ++y)
        for (int x = 0; x < resolution; ++x) {
            const double n = noise * normal(rng);
            if (r.mask_labels.at(x, y) == Label::background) {
                put(r.texture, x, y, bg, 0.0);
                continue;
            }
            if (col_in[std::size_t(x)] && row_in[std::size_t(y)]) {
                r.pane_labels.at(x, y) = Label::pane;
                const Vec2 p = raster.pixel_center(x, y);
                const double streak = 0.12 * std::sin(2.5 * (p.x() + p.y()) / std::max(w.width, w.height) * M_PI);
                put(r.texture, x, y, w.glass, streak + 0.5 * n);
            } else {
                put(r.texture, x, y, w.frame, n);
            }
        }
    return r;
}

} // namespace mdetail::synth

#include <algorithm>
#include <cmath>

#include "mdetail/geometry/geometry.hpp"

namespace mdetail::geometry {

namespace {

float bilinear(const Image& img, double sx, double sy, int c) {
    sx = std::clamp(sx, 0.0, double(img.width() - 1));
    sy = std::clamp(sy, 0.0, double(img.height() - 1));
    const int x0 = int(std::floor(sx)), y0 = int(std::floor(sy));
    const int x1 = std::min(x0 + 1, img.width() - 1), y1 = std::min(y0 + 1, img.height() - 1);
    const double fx = sx - x0, fy = sy - y0;
    const double top = (1 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
    const double bottom = (1 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
    return float((1 - fy) * top + fy * bottom);
}

} // namespace

MergedMaps merge_window_maps(const Image& texture, const LabelGrid& labels, double pixels_per_meter,
                             const std::vector<chains::WindowResult>& windows,
                             const std::vector<regularize::DetailBox>& boxes, int feather_px) {
    if (labels.width != texture.width() || labels.height != texture.height())
        throw Error("merge_window_maps: label raster size differs from the texture");
    for (std::size_t i = 0; i < boxes.size(); ++i)
        for (std::size_t j = i + 1; j < boxes.size(); ++j)
            if (boxes[i].label == Label::window && boxes[j].label == Label::window && boxes[i].rect.overlaps(boxes[j].rect))
                throw Error("merge_window_maps: window boxes " + std::to_string(i) + " and " + std::to_string(j) +
                            " overlap");

    MergedMaps out{texture, labels, {}};
    const regularize::RasterGeometry raster{texture.width(), texture.height(), pixels_per_meter};
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto& box = boxes[i];
        if (box.label != Label::window) continue;
        const auto it = std::find_if(windows.begin(), windows.end(), [&](const auto& w) { return w.index == int(i); });
        if (it == windows.end()) {
            out.warnings.push_back("window " + std::to_string(i) + " has no window result; facade texture kept");
            continue;
        }
        const auto& w = *it;
        if (w.texture.empty() || w.panes.width != w.texture.width() || w.panes.height != w.texture.height())
            throw Error("merge_window_maps: window " + std::to_string(i) + " texture and panes differ in size");
        int c0, r0, c1, r1;
        if (!raster.pixel_range(box.rect, c0, r0, c1, r1)) continue;
        const int ch = w.texture.height();
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c) {
                const Vec2 p = raster.pixel_center(c, r);
                const double lx = (p.x() - box.rect.x) * w.pixels_per_meter;
                const double ly = (p.y() - box.rect.y) * w.pixels_per_meter;
                const int d = std::min({c - c0, c1 - c, r - r0, r1 - r});
                const float a = feather_px > 0 ? float(std::min(1.0, (d + 0.5) / feather_px)) : 1.0f;
                for (int k = 0; k < 3; ++k) {
                    const float v = bilinear(w.texture, lx - 0.5, ch - ly - 0.5, k);
                    out.texture.at(c, r, k) = a == 1.0f ? v : a * v + (1.0f - a) * texture.at(c, r, k);
                }
                const int pc = std::clamp(int(std::floor(lx)), 0, w.panes.width - 1);
                const int pr = std::clamp(ch - 1 - int(std::floor(ly)), 0, ch - 1);
                const Label l = w.panes.at(pc, pr);
                if (l != Label::background) out.labels.at(c, r) = l;
            }
    }
    return out;
}

} // namespace mdetail::geometry

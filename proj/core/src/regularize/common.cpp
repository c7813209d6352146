#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdetail/error.hpp"
#include "mdetail/regularize/regularize.hpp"

namespace mdetail::regularize {

std::string_view source_name(BoxSource s) {
    switch (s) {
    case BoxSource::raw: return "raw";
    case BoxSource::snapped: return "snapped";
    case BoxSource::propagated: return "propagated";
    }
    return "raw";
}

BoxSource source_from_name(std::string_view name) {
    if (name == "raw") return BoxSource::raw;
    if (name == "snapped") return BoxSource::snapped;
    if (name == "propagated") return BoxSource::propagated;
    throw Error("unknown box source '" + std::string(name) + "'");
}

Rect RasterGeometry::pixel_rect(int min_col, int min_row, int max_col, int max_row) const {
    const double ppm = pixels_per_meter;
    return {min_col / ppm, (rows - max_row - 1) / ppm, (max_col - min_col + 1) / ppm, (max_row - min_row + 1) / ppm};
}

bool RasterGeometry::pixel_range(const Rect& r, int& min_col, int& min_row, int& max_col, int& max_row) const {
    const double ppm = pixels_per_meter;
    // centers (c + 0.5)/ppm in [x, right]
    min_col = std::max(0, int(std::ceil(r.x * ppm - 0.5)));
    max_col = std::min(cols - 1, int(std::floor(r.right() * ppm - 0.5)));
    // y = (rows - row - 0.5)/ppm in [y, top]  =>  row in [rows - top*ppm - 0.5, rows - y*ppm - 0.5]
    min_row = std::max(0, int(std::ceil(rows - r.top() * ppm - 0.5)));
    max_row = std::min(rows - 1, int(std::floor(rows - r.y * ppm - 0.5)));
    return min_col <= max_col && min_row <= max_row;
}

std::vector<Component> connected_components(const LabelGrid& grid, Label label) {
    std::vector<Component> out;
    std::vector<char> seen(grid.labels.size(), 0);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) {
            const std::size_t i = std::size_t(y) * std::size_t(grid.width) + std::size_t(x);
            if (seen[i] || grid.labels[i] != label) continue;
            Component c{label, {}, x, x, y, y};
            seen[i] = 1;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                c.pixels.push_back({cx, cy});
                c.min_col = std::min(c.min_col, cx);
                c.max_col = std::max(c.max_col, cx);
                c.min_row = std::min(c.min_row, cy);
                c.max_row = std::max(c.max_row, cy);
                constexpr int dx[] = {1, -1, 0, 0};
                constexpr int dy[] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nx = cx + dx[k], ny = cy + dy[k];
                    if (!grid.contains(nx, ny)) continue;
                    const std::size_t j = std::size_t(ny) * std::size_t(grid.width) + std::size_t(nx);
                    if (seen[j] || grid.labels[j] != label) continue;
                    seen[j] = 1;
                    stack.push_back({nx, ny});
                }
            }
            std::sort(c.pixels.begin(), c.pixels.end(),
                      [](auto a, auto b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
            out.push_back(std::move(c));
        }
    return out;
}

ModeFit mean_shift_1d(std::span<const double> samples, const MeanShiftConfig& config) {
    ModeFit fit;
    const std::size_t n = samples.size();
    fit.assignment.assign(n, -1);
    if (n == 0) return fit;
    const double half = 0.5 * config.kernel_width;

    std::vector<double> converged(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = samples[i];
        for (int it = 0; it < config.max_iterations; ++it) {
            double sum = 0;
            int count = 0;
            for (double s : samples)
                if (std::abs(s - x) <= half) {
                    sum += s;
                    ++count;
                }
            const double next = sum / count;
            const double moved = std::abs(next - x);
            x = next;
            if (moved < config.tolerance) break;
        }
        converged[i] = x;
    }

    // Merge converged points closer than the kernel width; the mode is the
    // mean of the samples that reached it.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return converged[a] < converged[b]; });
    std::vector<std::vector<std::size_t>> groups{{order[0]}};
    for (std::size_t k = 1; k < n; ++k) {
        if (converged[order[k]] - converged[order[k - 1]] <= config.kernel_width)
            groups.back().push_back(order[k]);
        else
            groups.push_back({order[k]});
    }
    for (const auto& g : groups) {
        std::vector<double> members;
        for (auto i : g) members.push_back(samples[i]);
        std::sort(members.begin(), members.end());
        const double mode = std::accumulate(members.begin(), members.end(), 0.0) / double(members.size());
        for (auto i : g) fit.assignment[i] = int(fit.modes.size());
        fit.modes.push_back(mode);
    }
    return fit;
}

Polygon2 box_corners(const DetailBox& box) {
    const Vec2 c = box.rect.center();
    const double a = box.rotation_deg * M_PI / 180.0;
    const Vec2 ex(std::cos(a), std::sin(a));
    const Vec2 ey(-std::sin(a), std::cos(a));
    const double hw = 0.5 * box.rect.w, hh = 0.5 * box.rect.h;
    return {c - hw * ex - hh * ey, c + hw * ex - hh * ey, c + hw * ex + hh * ey, c - hw * ex + hh * ey};
}

void paint_boxes(LabelGrid& grid, const RasterGeometry& raster, std::span<const DetailBox> boxes) {
    for (const auto& b : boxes) {
        if (b.rotation_deg == 0.0) {
            int c0, r0, c1, r1;
            if (!raster.pixel_range(b.rect, c0, r0, c1, r1)) continue;
            for (int r = r0; r <= r1; ++r)
                for (int c = c0; c <= c1; ++c) grid.at(c, r) = b.label;
            continue;
        }
        const Polygon2 poly = box_corners(b);
        const Rect bb = bounding_rect(poly);
        int c0, r0, c1, r1;
        if (!raster.pixel_range(bb, c0, r0, c1, r1)) continue;
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c)
                if (point_in_polygon(raster.pixel_center(c, r), poly)) grid.at(c, r) = b.label;
    }
}

} // namespace mdetail::regularize

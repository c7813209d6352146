#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdetail/regularize/regularize.hpp"

namespace mdetail::regularize {

namespace {

std::vector<std::vector<std::size_t>> group_by(const std::vector<DetailBox>& boxes, bool rows) {
    std::vector<std::size_t> order(boxes.size());
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](std::size_t i) { return rows ? boxes[i].rect.center().y() : boxes[i].rect.center().x(); };
    auto extent = [&](std::size_t i) { return rows ? boxes[i].rect.h : boxes[i].rect.w; };
    auto along = [&](std::size_t i) { return rows ? boxes[i].rect.x : boxes[i].rect.y; };
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return key(a) < key(b); });

    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        if (k > 0) {
            const std::size_t prev = order[k - 1];
            if (key(i) - key(prev) <= 0.5 * std::min(extent(i), extent(prev))) {
                groups.back().push_back(i);
                continue;
            }
        }
        groups.push_back({i});
    }
    for (auto& g : groups) std::stable_sort(g.begin(), g.end(), [&](auto a, auto b) { return along(a) < along(b); });
    return groups;
}

/// Snaps every sample to its mode.
std::vector<double> snap(const std::vector<double>& samples, const MeanShiftConfig& config) {
    const ModeFit fit = mean_shift_1d(samples, config);
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = fit.modes[std::size_t(fit.assignment[i])];
    return out;
}

/// Lays the boxes of each group out along one axis with snapped sizes and
/// gaps, preserving each group's midpoint.
void layout_axis(std::vector<DetailBox>& boxes, const std::vector<std::vector<std::size_t>>& groups, bool x_axis,
                 double limit, const MeanShiftConfig& config) {
    auto pos = [&](DetailBox& b) -> double& { return x_axis ? b.rect.x : b.rect.y; };
    auto size = [&](DetailBox& b) -> double& { return x_axis ? b.rect.w : b.rect.h; };

    std::vector<double> sizes;
    for (auto& b : boxes) sizes.push_back(size(b));
    const std::vector<double> snapped_sizes = snap(sizes, config);

    std::vector<double> gaps;
    for (const auto& g : groups)
        for (std::size_t k = 0; k + 1 < g.size(); ++k) gaps.push_back(pos(boxes[g[k + 1]]) - (pos(boxes[g[k]]) + size(boxes[g[k]])));
    const std::vector<double> snapped_gaps = snap(gaps, config);

    std::size_t gap_index = 0;
    for (const auto& g : groups) {
        const double start = pos(boxes[g.front()]);
        const double end = pos(boxes[g.back()]) + size(boxes[g.back()]);
        double span = 0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            span += snapped_sizes[g[k]];
            if (k + 1 < g.size()) span += snapped_gaps[gap_index + k];
        }
        if (span > limit) {
            // The snapped row no longer fits the facade; keep it as detected.
            gap_index += g.size() - 1;
            continue;
        }
        double cursor = std::clamp(0.5 * (start + end) - 0.5 * span, 0.0, limit - span);
        for (std::size_t k = 0; k < g.size(); ++k) {
            DetailBox& b = boxes[g[k]];
            pos(b) = cursor;
            size(b) = snapped_sizes[g[k]];
            cursor += size(b);
            if (k + 1 < g.size()) cursor += snapped_gaps[gap_index + k];
        }
        gap_index += g.size() - 1;
    }
}

std::vector<DetailBox> regularize_group(std::vector<DetailBox> boxes, Vec2 bounds, const WindowConfig& config) {
    if (boxes.empty()) return boxes;
    const auto rows = group_rows(boxes);
    const auto columns = group_columns(boxes);
    layout_axis(boxes, rows, true, bounds.x(), config.mean_shift);
    layout_axis(boxes, columns, false, bounds.y(), config.mean_shift);
    for (auto& b : boxes) b.source = BoxSource::snapped;
    return boxes;
}

/// Boxes that a snap made collide fall back to their input rectangles; input
/// boxes never overlap each other, so this terminates.
void revert_new_overlaps(std::vector<DetailBox>& out, const std::vector<DetailBox>& in) {
    for (;;) {
        bool changed = false;
        for (std::size_t i = 0; i < out.size() && !changed; ++i)
            for (std::size_t j = i + 1; j < out.size() && !changed; ++j) {
                if (!out[i].rect.overlaps(out[j].rect) || in[i].rect.overlaps(in[j].rect)) continue;
                for (std::size_t k : {i, j})
                    if (out[k] != in[k]) {
                        out[k] = in[k];
                        changed = true;
                    }
            }
        if (!changed) return;
    }
}

} // namespace

std::vector<std::vector<std::size_t>> group_rows(const std::vector<DetailBox>& boxes) { return group_by(boxes, true); }
std::vector<std::vector<std::size_t>> group_columns(const std::vector<DetailBox>& boxes) {
    return group_by(boxes, false);
}

std::vector<DetailBox> regularize_window_boxes(const std::vector<DetailBox>& boxes, Vec2 bounds,
                                               const WindowConfig& config) {
    std::vector<DetailBox> out = boxes;
    for (Label label : {Label::window, Label::door}) {
        std::vector<std::size_t> idx;
        std::vector<DetailBox> group;
        for (std::size_t i = 0; i < boxes.size(); ++i)
            if (boxes[i].label == label) {
                idx.push_back(i);
                group.push_back(boxes[i]);
            }
        group = regularize_group(std::move(group), bounds, config);
        for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = group[k];
    }
    revert_new_overlaps(out, boxes);
    return out;
}

std::vector<DetailBox> regularize_facade_windows(const LabelGrid& raw, double pixels_per_meter,
                                                 const WindowConfig& config) {
    const RasterGeometry raster{raw.width, raw.height, pixels_per_meter};
    std::vector<DetailBox> boxes;
    for (Label label : {Label::window, Label::door})
        for (const auto& c : connected_components(raw, label)) {
            DetailBox b;
            b.label = label;
            b.rect = raster.pixel_rect(c.min_col, c.min_row, c.max_col, c.max_row);
            boxes.push_back(b);
        }
    // Bounding boxes of interleaved blobs can overlap; merge them so the
    // regularizer starts from disjoint rectangles.
    for (bool merged = true; merged;) {
        merged = false;
        for (std::size_t i = 0; i < boxes.size() && !merged; ++i)
            for (std::size_t j = i + 1; j < boxes.size() && !merged; ++j) {
                if (!boxes[i].rect.overlaps(boxes[j].rect)) continue;
                Rect& a = boxes[i].rect;
                const Rect& b = boxes[j].rect;
                if (b.area() > a.area()) boxes[i].label = boxes[j].label;
                const double x0 = std::min(a.x, b.x), y0 = std::min(a.y, b.y);
                a = {x0, y0, std::max(a.right(), b.right()) - x0, std::max(a.top(), b.top()) - y0};
                boxes.erase(boxes.begin() + std::ptrdiff_t(j));
                merged = true;
            }
    }
    return regularize_window_boxes(boxes, {raster.width_m(), raster.height_m()}, config);
}

} // namespace mdetail::regularize

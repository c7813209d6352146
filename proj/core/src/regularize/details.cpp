#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mdetail/regularize/regularize.hpp"

namespace mdetail::regularize {

namespace {

constexpr double kFlush = 1e-9;

double overlap(double a0, double a1, double b0, double b1) { return std::min(a1, b1) - std::max(a0, b0); }

bool attached_below(const DetailBox& d, const DetailBox& w) {
    return std::abs(d.rect.top() - w.rect.y) <= kFlush && overlap(d.rect.x, d.rect.right(), w.rect.x, w.rect.right()) > 0;
}

bool attached_above(const DetailBox& d, const DetailBox& w) {
    return std::abs(d.rect.y - w.rect.top()) <= kFlush && overlap(d.rect.x, d.rect.right(), w.rect.x, w.rect.right()) > 0;
}

/// Moves `d` flush against the nearest window edge within `reach`.
void snap_to_windows(DetailBox& d, const std::vector<DetailBox>& windows, double reach) {
    double best = std::numeric_limits<double>::infinity();
    Vec2 shift(0, 0);
    for (const auto& w : windows) {
        const bool h_overlap = overlap(d.rect.x, d.rect.right(), w.rect.x, w.rect.right()) > 0;
        const bool v_overlap = overlap(d.rect.y, d.rect.top(), w.rect.y, w.rect.top()) > 0;
        auto consider = [&](double gap, Vec2 s) {
            if (gap >= -reach && gap <= reach && std::abs(gap) < best) {
                best = std::abs(gap);
                shift = s;
            }
        };
        if (h_overlap) {
            const double below = w.rect.y - d.rect.top();  // detail under the window
            consider(below, {0, below});
            const double above = d.rect.y - w.rect.top();  // detail over the window
            consider(above, {0, -above});
        }
        if (v_overlap) {
            const double left = w.rect.x - d.rect.right();
            consider(left, {left, 0});
            const double right = d.rect.x - w.rect.right();
            consider(right, {-right, 0});
        }
    }
    if (std::isfinite(best)) {
        if (best > 0) d.source = BoxSource::snapped;
        d.rect.x += shift.x();
        d.rect.y += shift.y();
    }
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::vector<DetailBox> regularize_detail_boxes(const std::vector<DetailBox>& details,
                                               const std::vector<DetailBox>& windows, Vec2 bounds,
                                               const DetailConfig& config) {
    std::vector<DetailBox> out = details;
    for (auto& d : out) snap_to_windows(d, windows, config.snap_distance);

    std::vector<DetailBox> window_only;
    for (const auto& w : windows)
        if (w.label == Label::window) window_only.push_back(w);

    for (const auto& row : group_rows(window_only)) {
        const std::size_t n = row.size();
        for (Label label : {Label::sill, Label::balcony, Label::molding}) {
            for (bool below : {true, false}) {
                std::vector<std::optional<std::size_t>> attached(n);
                std::vector<double> widths, heights;
                for (std::size_t k = 0; k < n; ++k) {
                    const DetailBox& w = window_only[row[k]];
                    for (std::size_t j = 0; j < out.size(); ++j) {
                        if (out[j].label != label) continue;
                        if (below ? attached_below(out[j], w) : attached_above(out[j], w)) {
                            attached[k] = j;
                            widths.push_back(out[j].rect.w);
                            heights.push_back(out[j].rect.h);
                            break;
                        }
                    }
                }
                const std::size_t count = widths.size();
                if (count * 2 <= n || count == n) continue;
                const double mw = median(widths), mh = median(heights);
                for (std::size_t k = 0; k < n; ++k) {
                    if (attached[k]) continue;
                    const DetailBox& w = window_only[row[k]];
                    DetailBox clone;
                    clone.label = label;
                    clone.source = BoxSource::propagated;
                    clone.rect.w = mw;
                    clone.rect.h = mh;
                    clone.rect.x = std::clamp(w.rect.center().x() - 0.5 * mw, 0.0, std::max(0.0, bounds.x() - mw));
                    clone.rect.y = below ? w.rect.y - mh : w.rect.top();
                    out.push_back(clone);
                }
            }
        }
    }
    return out;
}

std::vector<DetailBox> regularize_facade_details(const LabelGrid& full, double pixels_per_meter,
                                                 const std::vector<DetailBox>& windows, const DetailConfig& config) {
    const RasterGeometry raster{full.width, full.height, pixels_per_meter};
    std::vector<DetailBox> details;
    for (Label label : {Label::sill, Label::ledge, Label::molding, Label::balcony})
        for (const auto& c : connected_components(full, label)) {
            DetailBox b;
            b.label = label;
            b.rect = raster.pixel_rect(c.min_col, c.min_row, c.max_col, c.max_row);
            details.push_back(b);
        }
    return regularize_detail_boxes(details, windows, {raster.width_m(), raster.height_m()}, config);
}

} // namespace mdetail::regularize

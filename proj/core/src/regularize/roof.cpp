#include <algorithm>
#include <cmath>

#include "mdetail/regularize/regularize.hpp"

namespace mdetail::regularize {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Proper crossing of two segments (shared endpoints and collinear touching excluded).
bool segments_cross(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1) {
    const double d1 = cross(p1 - p0, q0 - p0), d2 = cross(p1 - p0, q1 - p0);
    const double d3 = cross(q1 - q0, p0 - q0), d4 = cross(q1 - q0, p1 - q0);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool inside_polygon(const Polygon2& inner, const Polygon2& outer) {
    for (const auto& p : inner)
        if (!point_in_polygon(p, outer)) return false;
    for (std::size_t i = 0; i < inner.size(); ++i)
        for (std::size_t j = 0; j < outer.size(); ++j)
            if (segments_cross(inner[i], inner[(i + 1) % inner.size()], outer[j], outer[(j + 1) % outer.size()]))
                return false;
    return true;
}

Polygon2 rect_polygon(const Rect& r) { return {{r.x, r.y}, {r.right(), r.y}, {r.right(), r.top()}, {r.x, r.top()}}; }

bool fits(const DetailBox& box, const RoofLayout& layout) {
    const Polygon2 corners = box_corners(box);
    if (!inside_polygon(corners, layout.pitches[std::size_t(box.pitch)].outline)) return false;
    for (const auto& d : layout.dormers)
        if (polygons_intersect(corners, rect_polygon(d))) return false;
    return true;
}

DetailBox square_at(Label label, const Vec2& center, double side, double angle, int pitch) {
    DetailBox b;
    b.label = label;
    b.rect = {center.x() - 0.5 * side, center.y() - 0.5 * side, side, side};
    b.rotation_deg = angle;
    b.pitch = pitch;
    return b;
}

int pitch_containing(const Vec2& p, const RoofLayout& layout) {
    for (std::size_t i = 0; i < layout.pitches.size(); ++i)
        if (point_in_polygon(p, layout.pitches[i].outline)) return int(i);
    return -1;
}

} // namespace

std::vector<DetailBox> regularize_roof_boxes(const std::vector<DetailBox>& boxes, const RoofLayout& layout,
                                             const RoofConfig& config) {
    std::vector<DetailBox> out;
    for (DetailBox b : boxes) {
        const double area = b.rect.area();
        if (std::sqrt(area / M_PI) < config.min_radius) continue;
        const Vec2 center = b.rect.center();
        if (b.pitch < 0 || b.pitch >= int(layout.pitches.size())) b.pitch = pitch_containing(center, layout);
        if (b.pitch < 0) continue;
        const RoofPitch& pitch = layout.pitches[std::size_t(b.pitch)];
        if (b.label == Label::roof_window && pitch.flat) continue;

        const double side = std::sqrt(area);
        DetailBox sq = square_at(b.label, center, side, pitch.gutter_angle_deg, b.pitch);
        sq.source = b.source;
        if (!fits(sq, layout)) {
            if (!point_in_polygon(center, pitch.outline)) continue;
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < config.shrink_iterations; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (fits(square_at(b.label, center, side * mid, pitch.gutter_angle_deg, b.pitch), layout))
                    lo = mid;
                else
                    hi = mid;
            }
            sq = square_at(b.label, center, side * lo, pitch.gutter_angle_deg, b.pitch);
            sq.source = BoxSource::snapped;
            if (lo == 0.0 || std::sqrt(sq.rect.area() / M_PI) < config.min_radius) continue;
        }
        out.push_back(sq);
    }
    return out;
}

std::vector<DetailBox> regularize_roof_labels(const LabelGrid& raw, double pixels_per_meter, const RoofLayout& layout,
                                              const RoofConfig& config) {
    const RasterGeometry raster{raw.width, raw.height, pixels_per_meter};
    const double pixel_area = 1.0 / (pixels_per_meter * pixels_per_meter);
    std::vector<DetailBox> boxes;
    for (Label label : {Label::chimney, Label::roof_window})
        for (const auto& c : connected_components(raw, label)) {
            const Rect extent = raster.pixel_rect(c.min_col, c.min_row, c.max_col, c.max_row);
            bool hits_dormer = false;
            for (const auto& d : layout.dormers) hits_dormer = hits_dormer || d.overlaps(extent);
            if (hits_dormer) {
                // Only drop the blob if one of its pixels is actually inside a dormer.
                hits_dormer = false;
                for (const auto& [col, row] : c.pixels)
                    for (const auto& d : layout.dormers) hits_dormer = hits_dormer || d.contains(raster.pixel_center(col, row));
            }
            if (hits_dormer) continue;

            std::vector<int> votes(layout.pitches.size(), 0);
            Vec2 centroid(0, 0);
            for (const auto& [col, row] : c.pixels) {
                const Vec2 p = raster.pixel_center(col, row);
                centroid += p;
                const int k = pitch_containing(p, layout);
                if (k >= 0) ++votes[std::size_t(k)];
            }
            centroid /= double(c.pixels.size());
            if (votes.empty()) continue;
            const int pitch = int(std::max_element(votes.begin(), votes.end()) - votes.begin());
            if (votes[std::size_t(pitch)] == 0) continue;
            if (!point_in_polygon(centroid, layout.pitches[std::size_t(pitch)].outline)) {
                Vec2 sum(0, 0);
                for (const auto& [col, row] : c.pixels) {
                    const Vec2 p = raster.pixel_center(col, row);
                    if (point_in_polygon(p, layout.pitches[std::size_t(pitch)].outline)) sum += p;
                }
                centroid = sum / double(votes[std::size_t(pitch)]);
            }
            const double side = std::sqrt(double(c.pixels.size()) * pixel_area);
            boxes.push_back(square_at(label, centroid, side, 0.0, pitch));
        }
    return regularize_roof_boxes(boxes, layout, config);
}

} // namespace mdetail::regularize

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <vector>

namespace mdetail {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Polygon2 = std::vector<Vec2>;
using Polygon3 = std::vector<Vec3>;

struct Segment3 {
    Vec3 a;
    Vec3 b;
};

/// Axis-aligned rectangle [x, x+w] × [y, y+h].
struct Rect {
    double x = 0, y = 0, w = 0, h = 0;

    double right() const noexcept { return x + w; }
    double top() const noexcept { return y + h; }
    Vec2 center() const { return {x + 0.5 * w, y + 0.5 * h}; }
    double area() const noexcept { return w * h; }
    bool contains(const Vec2& p) const noexcept { return p.x() >= x && p.x() <= x + w && p.y() >= y && p.y() <= y + h; }
    bool overlaps(const Rect& o) const noexcept {
        return x < o.right() && o.x < right() && y < o.top() && o.y < top();
    }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Signed area, positive for counter-clockwise vertex order.
double signed_area(const Polygon2& poly);
/// Even-odd point-in-polygon test.
bool point_in_polygon(const Vec2& p, const Polygon2& poly);
Rect bounding_rect(const Polygon2& poly);
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);
/// True if the two simple polygons share any interior area or touch.
bool polygons_intersect(const Polygon2& a, const Polygon2& b);
/// Ear-clipping triangulation of a simple polygon; returns index triples.
std::vector<std::array<int, 3>> triangulate(const Polygon2& poly);

} // namespace mdetail

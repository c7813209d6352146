#include "mdetail/geometry2d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "mdetail/error.hpp"

namespace mdetail {

double signed_area(const Polygon2& poly) {
    double a = 0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

bool point_in_polygon(const Vec2& p, const Polygon2& poly) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
            if (p.x() < x) inside = !inside;
        }
    }
    return inside;
}

Rect bounding_rect(const Polygon2& poly) {
    if (poly.empty()) return {};
    double x0 = std::numeric_limits<double>::max(), y0 = x0;
    double x1 = std::numeric_limits<double>::lowest(), y1 = x1;
    for (const Vec2& p : poly) {
        x0 = std::min(x0, p.x());
        y0 = std::min(y0, p.y());
        x1 = std::max(x1, p.x());
        y1 = std::max(y1, p.y());
    }
    return {x0, y0, x1 - x0, y1 - y0};
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (a + t * ab - p).norm();
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (a + t * ab - p).norm();
}

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    auto on_segment = [](const Vec2& a, const Vec2& b, const Vec2& p) {
        return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
               p.y() <= std::max(a.y(), b.y());
    };
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

} // namespace

bool polygons_intersect(const Polygon2& a, const Polygon2& b) {
    if (a.empty() || b.empty()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()])) return true;
    return point_in_polygon(a[0], b) || point_in_polygon(b[0], a);
}

std::vector<std::array<int, 3>> triangulate(const Polygon2& poly) {
    const int n = int(poly.size());
    if (n < 3) throw Error("triangulate: fewer than 3 vertices");
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[std::size_t(i)] = i;
    if (signed_area(poly) < 0) std::reverse(idx.begin(), idx.end());

    std::vector<std::array<int, 3>> tris;
    auto is_ear = [&](std::size_t k) {
        const std::size_t m = idx.size();
        const Vec2& a = poly[std::size_t(idx[(k + m - 1) % m])];
        const Vec2& b = poly[std::size_t(idx[k])];
        const Vec2& c = poly[std::size_t(idx[(k + 1) % m])];
        if (cross(a, b, c) <= 1e-14) return false;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == k || j == (k + m - 1) % m || j == (k + 1) % m) continue;
            const Vec2& p = poly[std::size_t(idx[j])];
            if (cross(a, b, p) >= 0 && cross(b, c, p) >= 0 && cross(c, a, p) >= 0) return false;
        }
        return true;
    };
    std::size_t guard = 0;
    while (idx.size() > 3 && guard++ < std::size_t(n) * std::size_t(n)) {
        bool clipped = false;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (!is_ear(k)) continue;
            const std::size_t m = idx.size();
            tris.push_back({idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]});
            idx.erase(idx.begin() + std::ptrdiff_t(k));
            clipped = true;
            break;
        }
        if (!clipped) {
            // Collinear leftovers: drop the flattest vertex.
            idx.erase(idx.begin());
        }
    }
    if (idx.size() == 3 && std::abs(cross(poly[std::size_t(idx[0])], poly[std::size_t(idx[1])], poly[std::size_t(idx[2])])) > 1e-14)
        tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

} // namespace mdetail

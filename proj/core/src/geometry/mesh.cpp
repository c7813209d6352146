#include <algorithm>
#include <cmath>
#include <optional>

#include "mdetail/geometry/geometry.hpp"

namespace mdetail::geometry {

using regularize::DetailBox;

double SubMesh::triangle_area(std::size_t t) const {
    const auto& tri = triangles[t];
    const Vec3& a = vertices[std::size_t(tri[0])];
    const Vec3& b = vertices[std::size_t(tri[1])];
    const Vec3& c = vertices[std::size_t(tri[2])];
    return 0.5 * (b - a).cross(c - a).norm();
}

std::size_t DetailMesh::triangle_count() const {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.triangles.size();
    return n;
}

std::size_t DetailMesh::vertex_count() const {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.vertices.size();
    return n;
}

std::vector<double> balcony_post_positions(double x, double width, double spacing, double radius) {
    if (!(spacing > 0)) throw Error("balcony_post_positions: spacing must be positive");
    const double span = std::max(0.0, width - 2 * radius);
    const int n = int(std::ceil(width / spacing - 1e-9)) + 1;
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(x + radius + span * i / (n - 1));
    return out;
}

namespace {

constexpr double kMinArea = 1e-10;

Vec2 clamp_uv(Vec2 uv) { return {std::clamp(uv.x(), 0.0, 1.0), std::clamp(uv.y(), 0.0, 1.0)}; }

/// Maps facade coordinates (x, y, depth along the outward normal) to world
/// positions and UVs.
struct FacadeSpace {
    const scene::FacadeFrame& frame;
    Vec3 normal;

    Vec3 point(double x, double y, double d) const { return frame.to_world({x, y}) + d * normal; }
    Vec2 uv(double x, double y) const { return clamp_uv({x / frame.width, y / frame.height}); }
};

struct Builder {
    SubMesh& mesh;

    int vertex(const Vec3& p, const Vec2& uv) {
        mesh.vertices.push_back(p);
        mesh.uvs.push_back(uv);
        return int(mesh.vertices.size()) - 1;
    }
    void triangle(int a, int b, int c) {
        mesh.triangles.push_back({a, b, c});
        if (mesh.triangle_area(mesh.triangles.size() - 1) <= kMinArea) mesh.triangles.pop_back();
    }
    /// Counter-clockwise as seen from the visible side.
    void quad(const std::array<Vec3, 4>& p, const std::array<Vec2, 4>& uv) {
        int i[4];
        for (int k = 0; k < 4; ++k) i[k] = vertex(p[std::size_t(k)], uv[std::size_t(k)]);
        triangle(i[0], i[1], i[2]);
        triangle(i[0], i[2], i[3]);
    }
};

/// Axis-aligned facade-space box faces; `faces` picks which ones, by name.
struct Cuboid {
    double x0, x1, y0, y1, d0, d1;
};

enum Face : unsigned { kFront = 1, kBack = 2, kTop = 4, kBottom = 8, kLeft = 16, kRight = 32 };

void add_cuboid(Builder& b, const FacadeSpace& s, const Cuboid& c, unsigned faces) {
    auto P = [&](double x, double y, double d) { return s.point(x, y, d); };
    auto U = [&](double x, double y) { return s.uv(x, y); };
    const auto& [x0, x1, y0, y1, d0, d1] = c;
    if (faces & kFront)
        b.quad({P(x0, y0, d1), P(x1, y0, d1), P(x1, y1, d1), P(x0, y1, d1)}, {U(x0, y0), U(x1, y0), U(x1, y1), U(x0, y1)});
    if (faces & kBack)
        b.quad({P(x0, y0, d0), P(x0, y1, d0), P(x1, y1, d0), P(x1, y0, d0)}, {U(x0, y0), U(x0, y1), U(x1, y1), U(x1, y0)});
    if (faces & kTop)
        b.quad({P(x0, y1, d1), P(x1, y1, d1), P(x1, y1, d0), P(x0, y1, d0)}, {U(x0, y1), U(x1, y1), U(x1, y1), U(x0, y1)});
    if (faces & kBottom)
        b.quad({P(x0, y0, d0), P(x1, y0, d0), P(x1, y0, d1), P(x0, y0, d1)}, {U(x0, y0), U(x1, y0), U(x1, y0), U(x0, y0)});
    if (faces & kRight)
        b.quad({P(x1, y0, d1), P(x1, y0, d0), P(x1, y1, d0), P(x1, y1, d1)}, {U(x1, y0), U(x1, y0), U(x1, y1), U(x1, y1)});
    if (faces & kLeft)
        b.quad({P(x0, y0, d0), P(x0, y0, d1), P(x0, y1, d1), P(x0, y1, d0)}, {U(x0, y0), U(x0, y0), U(x0, y1), U(x0, y1)});
}

/// Recessed opening: reveal walls facing into the hole plus the back pane.
void add_inset(Builder& b, const FacadeSpace& s, const Rect& r, double depth) {
    auto P = [&](double x, double y, double d) { return s.point(x, y, d); };
    auto U = [&](double x, double y) { return s.uv(x, y); };
    const double x0 = r.x, x1 = r.right(), y0 = r.y, y1 = r.top(), d0 = -depth, d1 = 0.0;
    b.quad({P(x0, y0, d0), P(x1, y0, d0), P(x1, y1, d0), P(x0, y1, d0)}, {U(x0, y0), U(x1, y0), U(x1, y1), U(x0, y1)});
    b.quad({P(x0, y0, d1), P(x0, y0, d0), P(x0, y1, d0), P(x0, y1, d1)}, {U(x0, y0), U(x0, y0), U(x0, y1), U(x0, y1)});
    b.quad({P(x1, y0, d0), P(x1, y0, d1), P(x1, y1, d1), P(x1, y1, d0)}, {U(x1, y0), U(x1, y0), U(x1, y1), U(x1, y1)});
    b.quad({P(x0, y0, d1), P(x1, y0, d1), P(x1, y0, d0), P(x0, y0, d0)}, {U(x0, y0), U(x1, y0), U(x1, y0), U(x0, y0)});
    b.quad({P(x0, y1, d0), P(x1, y1, d0), P(x1, y1, d1), P(x0, y1, d1)}, {U(x0, y1), U(x1, y1), U(x1, y1), U(x0, y1)});
}

/// Upward unit normal of a planar face.
Vec3 upward_normal(const Polygon3& face) {
    Vec3 n = Vec3::Zero();
    for (std::size_t i = 0; i < face.size(); ++i) {
        const Vec3& a = face[i];
        const Vec3& b = face[(i + 1) % face.size()];
        n += Vec3((a.y() - b.y()) * (a.z() + b.z()), (a.z() - b.z()) * (a.x() + b.x()), (a.x() - b.x()) * (a.y() + b.y()));
    }
    if (n.norm() == 0) return Vec3::UnitZ();
    n.normalize();
    return n.z() < 0 ? Vec3(-n) : n;
}

Polygon2 xy(const Polygon3& face) {
    Polygon2 out;
    for (const Vec3& p : face) out.push_back(p.head<2>());
    return out;
}

/// Distance along `dir` from `p` to the nearest roof face it hits.
std::optional<double> roof_hit(const Vec3& p, const Vec3& dir, const std::vector<Polygon3>& faces) {
    std::optional<double> best;
    for (const auto& face : faces) {
        if (face.size() < 3) continue;
        const Vec3 n = upward_normal(face);
        const double denom = n.dot(dir);
        if (std::abs(denom) < 1e-9) continue;
        const double t = n.dot(face[0] - p) / denom;
        if (t < 0) continue;
        if (!point_in_polygon((p + t * dir).head<2>(), xy(face))) continue;
        if (!best || t < *best) best = t;
    }
    return best;
}

void check_inside(const Rect& r, double width, double height, std::size_t index, Label label) {
    constexpr double eps = 1e-6;
    if (r.x < -eps || r.y < -eps || r.right() > width + eps || r.top() > height + eps || !(r.w > 0) || !(r.h > 0))
        throw Error("box " + std::to_string(index) + " (" + std::string(label_name(label)) + ") lies outside the frame");
}

/// Wall base: horizontal strips of the outline with the openings removed.
void add_wall(Builder& b, const FacadeSpace& s, const Polygon2& outline, const std::vector<Rect>& holes) {
    std::vector<double> ys;
    for (const Vec2& p : outline) ys.push_back(p.y());
    const double ymin = *std::min_element(ys.begin(), ys.end()), ymax = *std::max_element(ys.begin(), ys.end());
    for (const Rect& h : holes)
        for (double y : {h.y, h.top()}) ys.push_back(std::clamp(y, ymin, ymax));
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end(), [](double a, double c) { return std::abs(a - c) < 1e-9; }), ys.end());

    struct Edge {
        Vec2 a, b;
        double x_at(double y) const {
            if (std::abs(b.y() - a.y()) < 1e-15) return a.x();
            return a.x() + (b.x() - a.x()) * (y - a.y()) / (b.y() - a.y());
        }
    };
    for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
        const double y0 = ys[k], y1 = ys[k + 1], ym = 0.5 * (y0 + y1);
        std::vector<std::pair<double, Edge>> crossings;
        for (std::size_t i = 0; i < outline.size(); ++i) {
            const Vec2& a = outline[i];
            const Vec2& c = outline[(i + 1) % outline.size()];
            if ((a.y() <= ym) != (c.y() <= ym)) {
                const Edge e{a, c};
                crossings.push_back({e.x_at(ym), e});
            }
        }
        std::sort(crossings.begin(), crossings.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
        std::vector<Rect> strip_holes;
        for (const Rect& h : holes)
            if (h.y < ym && h.top() > ym) strip_holes.push_back(h);
        std::sort(strip_holes.begin(), strip_holes.end(), [](const Rect& p, const Rect& q) { return p.x < q.x; });
        for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
            // Piece boundaries: either an outline edge or a vertical hole side.
            using Side = std::pair<double, double>;  // x at y0, x at y1
            std::vector<std::pair<Side, Side>> pieces;
            Side left{crossings[i].second.x_at(y0), crossings[i].second.x_at(y1)};
            const Side right{crossings[i + 1].second.x_at(y0), crossings[i + 1].second.x_at(y1)};
            for (const Rect& h : strip_holes) {
                if (h.right() <= crossings[i].first || h.x >= crossings[i + 1].first) continue;
                pieces.push_back({left, {h.x, h.x}});
                left = {h.right(), h.right()};
            }
            pieces.push_back({left, right});
            for (const auto& [l, r] : pieces) {
                if (r.first - l.first < 1e-12 && r.second - l.second < 1e-12) continue;
                b.quad({s.point(l.first, y0, 0), s.point(r.first, y0, 0), s.point(r.second, y1, 0), s.point(l.second, y1, 0)},
                       {s.uv(l.first, y0), s.uv(r.first, y0), s.uv(r.second, y1), s.uv(l.second, y1)});
            }
        }
    }
}

void add_balcony(Builder& b, const FacadeSpace& s, const Rect& r, const DetailProfile& p) {
    const double slab = std::min(0.1, 0.2 * r.h);
    const double rail = std::min(0.05, 0.1 * r.h);
    const double rad = std::min(p.balcony_post_radius, 0.25 * r.w);
    const double depth = p.balcony_depth;
    add_cuboid(b, s, {r.x, r.right(), r.y, r.y + slab, 0.0, depth}, kFront | kTop | kBottom | kLeft | kRight);
    for (double x : balcony_post_positions(r.x, r.w, p.balcony_post_spacing, rad))
        add_cuboid(b, s, {x - rad, x + rad, r.y + slab, r.top() - rail, depth - 2 * rad, depth},
                   kFront | kBack | kLeft | kRight);
    add_cuboid(b, s, {r.x, r.right(), r.top() - rail, r.top(), depth - 2 * rad, depth},
               kFront | kBack | kTop | kBottom | kLeft | kRight);
}

} // namespace

DetailMesh synthesize_facade_geometry(const std::vector<DetailBox>& boxes, const scene::FacadeFrame& frame,
                                      const Polygon2& outline, const std::vector<Polygon3>& roof_faces,
                                      const DetailProfile& profile) {
    if (outline.size() < 3) throw Error("synthesize_facade_geometry: outline needs at least 3 vertices");
    const FacadeSpace space{frame, frame.u.cross(frame.v).normalized()};
    for (std::size_t i = 0; i < boxes.size(); ++i) check_inside(boxes[i].rect, frame.width, frame.height, i, boxes[i].label);

    DetailMesh mesh;
    mesh.parts.emplace_back();
    mesh.parts[0].label = "wall";
    std::vector<Rect> holes;
    for (const auto& b : boxes)
        if ((b.label == Label::window || b.label == Label::door) && !b.dormer) holes.push_back(b.rect);
    {
        Builder builder{mesh.parts[0]};
        add_wall(builder, space, outline, holes);
    }

    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const DetailBox& box = boxes[i];
        SubMesh part;
        part.label = std::string(label_name(box.label));
        part.box_index = int(i);
        Builder b{part};
        const Rect& r = box.rect;
        switch (box.label) {
        case Label::window:
        case Label::door:
            if (box.dormer) {
                part.dormer = true;
                double depth = profile.dormer_default_depth;
                const Vec3 top = space.point(r.center().x(), r.top(), 0);
                if (auto t = roof_hit(top, -space.normal, roof_faces); t && *t > 0.05) depth = *t;
                add_cuboid(b, space, {r.x, r.right(), r.y, r.top(), -depth, 0.0}, kFront | kTop | kLeft | kRight);
            } else {
                add_inset(b, space, r, profile.window_inset);
            }
            break;
        case Label::sill:
        case Label::ledge:
        case Label::molding:
            add_cuboid(b, space, {r.x, r.right(), r.y, r.top(), 0.0, profile.extrusion},
                       kFront | kTop | kBottom | kLeft | kRight);
            break;
        case Label::balcony: add_balcony(b, space, r, profile); break;
        default:
            throw Error("box " + std::to_string(i) + " has label " + std::string(label_name(box.label)) +
                        ", which is not a facade detail");
        }
        mesh.parts.push_back(std::move(part));
    }
    return mesh;
}

DetailMesh synthesize_roof_geometry(const std::vector<DetailBox>& boxes, const scene::Roof& roof,
                                    const scene::FacadeFrame& frame, const DetailProfile& profile) {
    auto uv = [&](const Vec3& p) {
        const Vec2 q = frame.to_frame(p);
        return clamp_uv({q.x() / frame.width, q.y() / frame.height});
    };
    DetailMesh mesh;
    mesh.parts.emplace_back();
    mesh.parts[0].label = "roof";
    {
        Builder b{mesh.parts[0]};
        for (const auto& face : roof.faces) {
            if (face.size() < 3) continue;
            const Polygon2 top = xy(face);
            std::vector<int> idx;
            for (const Vec3& p : face) idx.push_back(b.vertex(p, uv(p)));
            for (const auto& t : triangulate(top)) {
                const int a = idx[std::size_t(t[0])], c = idx[std::size_t(t[1])], d = idx[std::size_t(t[2])];
                const Vec3 n = (face[std::size_t(t[1])] - face[std::size_t(t[0])]).cross(face[std::size_t(t[2])] - face[std::size_t(t[0])]);
                if (n.z() >= 0)
                    b.triangle(a, c, d);
                else
                    b.triangle(a, d, c);
            }
        }
    }

    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const DetailBox& box = boxes[i];
        if (box.label != Label::chimney && box.label != Label::roof_window)
            throw Error("box " + std::to_string(i) + " has label " + std::string(label_name(box.label)) +
                        ", which is not a roof detail");
        const Polygon2 corners = regularize::box_corners(box);
        check_inside(bounding_rect(corners), frame.width, frame.height, i, box.label);

        // Plane of the pitch carrying the box.
        const Vec3 center = frame.to_world(box.rect.center());
        const Polygon3* face = nullptr;
        if (box.pitch >= 0 && std::size_t(box.pitch) < roof.faces.size()) face = &roof.faces[std::size_t(box.pitch)];
        for (std::size_t f = 0; !face && f < roof.faces.size(); ++f)
            if (point_in_polygon(center.head<2>(), xy(roof.faces[f]))) face = &roof.faces[f];
        if (!face) throw Error("box " + std::to_string(i) + " (" + std::string(label_name(box.label)) + ") is not over the roof");
        const Vec3 n = upward_normal(*face);
        const Vec3 p0 = (*face)[0];
        auto surface = [&](const Vec2& q) {
            const Vec3 w = frame.to_world(q);
            const double z = p0.z() - (n.x() * (w.x() - p0.x()) + n.y() * (w.y() - p0.y())) / n.z();
            return Vec3(w.x(), w.y(), z);
        };

        SubMesh part;
        part.label = std::string(label_name(box.label));
        part.box_index = int(i);
        Builder b{part};
        std::array<Vec3, 4> on_roof;
        for (int k = 0; k < 4; ++k) on_roof[std::size_t(k)] = surface(corners[std::size_t(k)]);
        if (box.label == Label::chimney) {
            double zb = on_roof[0].z(), zt = on_roof[0].z();
            for (const Vec3& p : on_roof) {
                zb = std::min(zb, p.z());
                zt = std::max(zt, p.z());
            }
            zt += profile.chimney_height;
            for (int k = 0; k < 4; ++k) {
                const Vec3& a = on_roof[std::size_t(k)];
                const Vec3& c = on_roof[std::size_t((k + 1) % 4)];
                const Vec3 a0(a.x(), a.y(), zb), c0(c.x(), c.y(), zb), c1(c.x(), c.y(), zt), a1(a.x(), a.y(), zt);
                b.quad({a0, c0, c1, a1}, {uv(a0), uv(c0), uv(c1), uv(a1)});
            }
            std::array<Vec3, 4> cap;
            for (int k = 0; k < 4; ++k) cap[std::size_t(k)] = {on_roof[std::size_t(k)].x(), on_roof[std::size_t(k)].y(), zt};
            b.quad(cap, {uv(cap[0]), uv(cap[1]), uv(cap[2]), uv(cap[3])});
        } else {
            std::array<Vec3, 4> q;
            for (int k = 0; k < 4; ++k) q[std::size_t(k)] = on_roof[std::size_t(k)] - profile.roof_window_inset * n;
            b.quad(q, {uv(q[0]), uv(q[1]), uv(q[2]), uv(q[3])});
        }
        mesh.parts.push_back(std::move(part));
    }
    return mesh;
}

} // namespace mdetail::geometry

#include "mdetail/scene/scene.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mdetail/error.hpp"

namespace mdetail::scene {

using nlohmann::json;

namespace {

constexpr double kPlanarTol = 1e-6;
constexpr double kOrthoTol = 1e-6;
constexpr double kEdgeTol = 1e-3;

bool same_segments(const std::vector<Segment3>& a, const std::vector<Segment3>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].a != b[i].a || a[i].b != b[i].b) return false;
    return true;
}

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw ParseError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(path + "." + key, "missing field");
    return *it;
}

double parse_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(path, "non-finite number");
    return v;
}

Vec3 parse_vec3(const json& j, const std::string& path, double scale) {
    if (!j.is_array() || j.size() != 3) throw ParseError(path, "expected [x,y,z]");
    return {parse_number(j[0], path + "[0]") * scale, parse_number(j[1], path + "[1]") * scale,
            parse_number(j[2], path + "[2]") * scale};
}

Vec2 parse_vec2(const json& j, const std::string& path, double scale) {
    if (!j.is_array() || j.size() != 2) throw ParseError(path, "expected [u,v]");
    return {parse_number(j[0], path + "[0]") * scale, parse_number(j[1], path + "[1]") * scale};
}

Polygon3 parse_polygon3(const json& j, const std::string& path, double scale) {
    if (!j.is_array() || j.size() < 3) throw ParseError(path, "expected at least 3 vertices");
    Polygon3 out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_vec3(j[i], path + "[" + std::to_string(i) + "]", scale));
    return out;
}

std::vector<Segment3> parse_segments(const json& j, const std::string& path, double scale) {
    if (!j.is_array()) throw ParseError(path, "expected an array of segments");
    std::vector<Segment3> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != 2) throw ParseError(p, "expected [[x,y,z],[x,y,z]]");
        out.push_back({parse_vec3(j[i][0], p + "[0]", scale), parse_vec3(j[i][1], p + "[1]", scale)});
    }
    return out;
}

double unit_scale(const std::string& units, const std::string& path) {
    if (units == "m") return 1.0;
    if (units == "cm") return 0.01;
    if (units == "mm") return 0.001;
    throw ParseError(path, "unsupported units '" + units + "'");
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

/// Distance from a point to a planar polygon (0 if it lies on it).
double point_polygon_distance(const Vec3& p, const Polygon3& poly) {
    double best = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < poly.size(); ++i)
        best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
    if (poly.size() < 3) return best;
    Vec3 n = Vec3::Zero();
    for (std::size_t i = 0; i < poly.size(); ++i) n += poly[i].cross(poly[(i + 1) % poly.size()]);
    if (n.norm() < 1e-12) return best;
    n.normalize();
    const double plane = (p - poly[0]).dot(n);
    const Vec3 q = p - plane * n;
    Vec3 a = (poly[1] - poly[0]).normalized();
    Vec3 b = n.cross(a);
    Polygon2 flat;
    for (const Vec3& v : poly) flat.emplace_back((v - poly[0]).dot(a), (v - poly[0]).dot(b));
    if (point_in_polygon({(q - poly[0]).dot(a), (q - poly[0]).dot(b)}, flat)) best = std::min(best, std::abs(plane));
    return best;
}

bool point_on_roof_boundary(const Vec3& p, const Roof& roof) {
    for (const auto& face : roof.faces)
        for (std::size_t i = 0; i < face.size(); ++i)
            if (point_segment_distance(p, face[i], face[(i + 1) % face.size()]) <= kEdgeTol) return true;
    return false;
}

} // namespace

bool operator==(const Roof& a, const Roof& b) {
    return a.faces == b.faces && same_segments(a.ridges, b.ridges) && same_segments(a.valleys, b.valleys) &&
           a.flat == b.flat;
}

const Building* MassModelScene::find(const std::string& id) const {
    for (const auto& b : buildings)
        if (b.id == id) return &b;
    return nullptr;
}

int FacadeFrame::cols() const { return std::max(1, int(std::ceil(width * pixels_per_meter - 1e-9))); }
int FacadeFrame::rows() const { return std::max(1, int(std::ceil(height * pixels_per_meter - 1e-9))); }

Vec2 FacadeFrame::to_frame(const Vec3& p) const {
    const Vec3 d = p - origin;
    return {d.dot(u), d.dot(v)};
}

Vec3 FacadeFrame::to_world(const Vec2& q) const { return origin + q.x() * u + q.y() * v; }

Vec2 FacadeFrame::pixel_center(int col, int row) const {
    return {(col + 0.5) / pixels_per_meter, (rows() - row - 0.5) / pixels_per_meter};
}

Vec2 FacadeFrame::to_pixel(const Vec2& q) const {
    return {q.x() * pixels_per_meter, rows() - q.y() * pixels_per_meter};
}

MassModelScene parse_scene(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError("$", e.what());
    }
    MassModelScene scene;
    double scale = 1.0;
    if (doc.contains("units")) {
        if (!doc["units"].is_string()) throw ParseError("units", "expected a string");
        scale = unit_scale(doc["units"].get<std::string>(), "units");
    }
    const json& buildings = require(doc, "buildings", "$");
    if (!buildings.is_array()) throw ParseError("buildings", "expected an array");
    for (std::size_t bi = 0; bi < buildings.size(); ++bi) {
        const std::string bp = "buildings[" + std::to_string(bi) + "]";
        const json& jb = buildings[bi];
        Building b;
        const json& id = require(jb, "id", bp);
        if (!id.is_string()) throw ParseError(bp + ".id", "expected a string");
        b.id = id.get<std::string>();
        const json& facades = require(jb, "facades", bp);
        if (!facades.is_array()) throw ParseError(bp + ".facades", "expected an array");
        for (std::size_t fi = 0; fi < facades.size(); ++fi) {
            const std::string fp = bp + ".facades[" + std::to_string(fi) + "]";
            const json& jf = facades[fi];
            Facade f;
            f.polygon = parse_polygon3(require(jf, "polygon", fp), fp + ".polygon", scale);
            f.up = parse_vec3(require(jf, "up", fp), fp + ".up", 1.0);
            f.normal = parse_vec3(require(jf, "normal", fp), fp + ".normal", 1.0);
            if (jf.contains("occluders")) {
                const json& occ = jf["occluders"];
                if (!occ.is_array()) throw ParseError(fp + ".occluders", "expected an array");
                for (std::size_t oi = 0; oi < occ.size(); ++oi) {
                    const std::string op = fp + ".occluders[" + std::to_string(oi) + "]";
                    if (!occ[oi].is_array() || occ[oi].size() < 3) throw ParseError(op, "expected at least 3 vertices");
                    Polygon2 poly;
                    for (std::size_t k = 0; k < occ[oi].size(); ++k)
                        poly.push_back(parse_vec2(occ[oi][k], op + "[" + std::to_string(k) + "]", scale));
                    f.occluders.push_back(std::move(poly));
                }
            }
            b.facades.push_back(std::move(f));
        }
        const std::string rp = bp + ".roof";
        const json& jr = require(jb, "roof", bp);
        const json& faces = require(jr, "faces", rp);
        if (!faces.is_array()) throw ParseError(rp + ".faces", "expected an array");
        for (std::size_t k = 0; k < faces.size(); ++k)
            b.roof.faces.push_back(parse_polygon3(faces[k], rp + ".faces[" + std::to_string(k) + "]", scale));
        if (jr.contains("ridges")) b.roof.ridges = parse_segments(jr["ridges"], rp + ".ridges", scale);
        if (jr.contains("valleys")) b.roof.valleys = parse_segments(jr["valleys"], rp + ".valleys", scale);
        if (jr.contains("flat")) {
            const json& flat = jr["flat"];
            if (!flat.is_array()) throw ParseError(rp + ".flat", "expected an array of booleans");
            for (std::size_t k = 0; k < flat.size(); ++k) {
                if (!flat[k].is_boolean()) throw ParseError(rp + ".flat[" + std::to_string(k) + "]", "expected a boolean");
                b.roof.flat.push_back(flat[k].get<bool>());
            }
        } else {
            b.roof.flat.assign(b.roof.faces.size(), false);
        }
        if (b.roof.flat.size() != b.roof.faces.size())
            throw ParseError(rp + ".flat", "expected one flag per face");
        scene.buildings.push_back(std::move(b));
    }
    if (doc.contains("blocks")) {
        const json& blocks = doc["blocks"];
        if (!blocks.is_array()) throw ParseError("blocks", "expected an array");
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            const std::string p = "blocks[" + std::to_string(k) + "]";
            if (!blocks[k].is_array()) throw ParseError(p, "expected an array of building ids");
            std::vector<std::string> ids;
            for (std::size_t m = 0; m < blocks[k].size(); ++m) {
                if (!blocks[k][m].is_string()) throw ParseError(p + "[" + std::to_string(m) + "]", "expected a string");
                ids.push_back(blocks[k][m].get<std::string>());
            }
            scene.blocks.push_back(std::move(ids));
        }
    }
    validate_scene(scene);
    return scene;
}

MassModelScene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scene file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str());
}

std::string scene_to_json(const MassModelScene& scene) {
    json doc;
    doc["units"] = "m";
    doc["buildings"] = json::array();
    for (const auto& b : scene.buildings) {
        json jb;
        jb["id"] = b.id;
        jb["facades"] = json::array();
        for (const auto& f : b.facades) {
            json jf;
            jf["polygon"] = json::array();
            for (const auto& p : f.polygon) jf["polygon"].push_back(vec_json(p));
            jf["up"] = vec_json(f.up);
            jf["normal"] = vec_json(f.normal);
            jf["occluders"] = json::array();
            for (const auto& o : f.occluders) {
                json jo = json::array();
                for (const auto& p : o) jo.push_back(vec_json(p));
                jf["occluders"].push_back(jo);
            }
            jb["facades"].push_back(jf);
        }
        json jr;
        jr["faces"] = json::array();
        for (const auto& face : b.roof.faces) {
            json jface = json::array();
            for (const auto& p : face) jface.push_back(vec_json(p));
            jr["faces"].push_back(jface);
        }
        auto segs = [](const std::vector<Segment3>& s) {
            json out = json::array();
            for (const auto& seg : s) out.push_back(json::array({vec_json(seg.a), vec_json(seg.b)}));
            return out;
        };
        jr["ridges"] = segs(b.roof.ridges);
        jr["valleys"] = segs(b.roof.valleys);
        jr["flat"] = json::array();
        for (bool f : b.roof.flat) jr["flat"].push_back(f);
        jb["roof"] = jr;
        doc["buildings"].push_back(jb);
    }
    doc["blocks"] = scene.blocks;
    return doc.dump(2);
}

void save_scene(const MassModelScene& scene, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write scene file " + path.string());
    out << scene_to_json(scene) << '\n';
}

double planarity_deviation(const Facade& facade) {
    const Vec3 n = facade.normal.normalized();
    double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
    for (const Vec3& p : facade.polygon) {
        const double d = p.dot(n);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return hi - lo;
}

Vec3 facade_u_axis(const Facade& facade) { return facade.up.cross(facade.normal).normalized(); }

void validate_scene(const MassModelScene& scene) {
    std::set<std::string> ids;
    for (std::size_t bi = 0; bi < scene.buildings.size(); ++bi) {
        const Building& b = scene.buildings[bi];
        const std::string bp = "buildings[" + std::to_string(bi) + "]";
        if (!ids.insert(b.id).second) throw ValidationError(bp + ".id", "duplicate building id '" + b.id + "'");
        if (b.facades.empty()) throw ValidationError(bp + ".facades", "building has no facades");
        for (std::size_t fi = 0; fi < b.facades.size(); ++fi) {
            const Facade& f = b.facades[fi];
            const std::string fp = bp + ".facades[" + std::to_string(fi) + "]";
            if (std::abs(f.up.norm() - 1.0) > kOrthoTol) throw ValidationError(fp + ".up", "not a unit vector", f.up.norm());
            if (std::abs(f.normal.norm() - 1.0) > kOrthoTol)
                throw ValidationError(fp + ".normal", "not a unit vector", f.normal.norm());
            const double dot = std::abs(f.up.dot(f.normal));
            if (dot > kOrthoTol) throw ValidationError(fp + ".up", "up axis not orthogonal to normal", dot);
            const double dev = planarity_deviation(f);
            if (dev > kPlanarTol) {
                std::ostringstream msg;
                msg << "facade polygon not planar, max deviation " << dev << " m";
                throw ValidationError(fp + ".polygon", msg.str(), dev);
            }
            const FacadeFrame frame = facade_frame(f, 1);
            const Polygon2 flat = project_polygon(f.polygon, frame);
            if (signed_area(flat) <= 0)
                throw ValidationError(fp + ".polygon", "vertices not counter-clockwise seen from outside");
            for (std::size_t oi = 0; oi < f.occluders.size(); ++oi)
                for (const Vec2& p : f.occluders[oi])
                    if (p.x() < -kEdgeTol || p.y() < -kEdgeTol || p.x() > frame.width + kEdgeTol ||
                        p.y() > frame.height + kEdgeTol)
                        throw ValidationError(fp + ".occluders[" + std::to_string(oi) + "]",
                                              "occluder outside facade bounding rectangle");
            if (!b.roof.faces.empty()) {
                bool shared = false;
                for (std::size_t k = 0; k < f.polygon.size() && !shared; ++k)
                    shared = point_on_roof_boundary(f.polygon[k], b.roof) &&
                             point_on_roof_boundary(f.polygon[(k + 1) % f.polygon.size()], b.roof);
                if (!shared) throw ValidationError(fp + ".polygon", "facade shares no edge with the roof boundary");
            }
        }
        for (std::size_t k = 0; k < b.roof.faces.size(); ++k) {
            const Polygon3& face = b.roof.faces[k];
            Vec3 n = Vec3::Zero();
            for (std::size_t i = 0; i < face.size(); ++i) n += face[i].cross(face[(i + 1) % face.size()]);
            if (n.norm() < 1e-9) throw ValidationError(bp + ".roof.faces[" + std::to_string(k) + "]", "degenerate roof face");
            n.normalize();
            double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
            for (const Vec3& p : face) {
                lo = std::min(lo, p.dot(n));
                hi = std::max(hi, p.dot(n));
            }
            if (hi - lo > kPlanarTol)
                throw ValidationError(bp + ".roof.faces[" + std::to_string(k) + "]", "roof face not planar", hi - lo);
        }
        auto check_lines = [&](const std::vector<Segment3>& segs, const std::string& name) {
            for (std::size_t k = 0; k < segs.size(); ++k)
                for (const Vec3* p : {&segs[k].a, &segs[k].b}) {
                    double best = std::numeric_limits<double>::max();
                    for (const auto& face : b.roof.faces) best = std::min(best, point_polygon_distance(*p, face));
                    if (best > kEdgeTol)
                        throw ValidationError(bp + ".roof." + name + "[" + std::to_string(k) + "]",
                                              "endpoint not on any roof face", best);
                }
        };
        check_lines(b.roof.ridges, "ridges");
        check_lines(b.roof.valleys, "valleys");
    }
    for (std::size_t k = 0; k < scene.blocks.size(); ++k)
        for (const auto& id : scene.blocks[k])
            if (!ids.count(id))
                throw ValidationError("blocks[" + std::to_string(k) + "]", "unknown building id '" + id + "'");
}

namespace {

FacadeFrame frame_from_bounds(const Vec3& anchor, const Vec3& u, const Vec3& v, const Rect& bounds,
                              int target_resolution) {
    if (bounds.w * bounds.h < 1e-6) throw ValidationError("facade", "degenerate polygon", bounds.w * bounds.h);
    FacadeFrame f;
    f.u = u;
    f.v = v;
    f.origin = anchor + bounds.x * u + bounds.y * v;
    f.width = bounds.w;
    f.height = bounds.h;
    f.pixels_per_meter = double(target_resolution) / std::max(bounds.w, bounds.h);
    return f;
}

} // namespace

FacadeFrame facade_frame(const Facade& facade, int target_resolution) {
    return facade_frame(facade, target_resolution, {});
}

FacadeFrame facade_frame(const Facade& facade, int target_resolution, const std::vector<Polygon2>& extra) {
    if (target_resolution <= 0) throw Error("facade_frame: resolution must be positive");
    if (facade.polygon.size() < 3) throw ValidationError("facade", "degenerate polygon", 0.0);
    const Vec3 u = facade_u_axis(facade);
    const Vec3 v = facade.up.normalized();
    const Vec3 anchor = facade.polygon.front();
    Polygon2 pts;
    for (const Vec3& p : facade.polygon) pts.emplace_back((p - anchor).dot(u), (p - anchor).dot(v));
    if (std::abs(signed_area(pts)) < 1e-6) throw ValidationError("facade", "degenerate polygon", std::abs(signed_area(pts)));
    // Extra polygons are expressed in the facade's own AABB frame.
    const Rect own = bounding_rect(pts);
    for (const auto& poly : extra)
        for (const Vec2& q : poly) pts.emplace_back(q.x() + own.x, q.y() + own.y);
    return frame_from_bounds(anchor, u, v, bounding_rect(pts), target_resolution);
}

Polygon2 project_polygon(const Polygon3& polygon, const FacadeFrame& frame) {
    Polygon2 out;
    for (const Vec3& p : polygon) out.push_back(frame.to_frame(p));
    return out;
}

std::vector<Polygon2> occluders_in_frame(const Facade& facade, const FacadeFrame& frame) {
    const FacadeFrame own = facade_frame(facade, 1);
    std::vector<Polygon2> out;
    for (const auto& occ : facade.occluders) {
        Polygon2 poly;
        for (const Vec2& q : occ) poly.push_back(frame.to_frame(own.to_world(q)));
        out.push_back(std::move(poly));
    }
    return out;
}

Image rasterize_polygons(const std::vector<Polygon2>& include, const std::vector<Polygon2>& exclude,
                         const FacadeFrame& frame) {
    Image mask(frame.cols(), frame.rows(), 1);
    for (int row = 0; row < mask.height(); ++row)
        for (int col = 0; col < mask.width(); ++col) {
            const Vec2 c = frame.pixel_center(col, row);
            bool in = std::any_of(include.begin(), include.end(), [&](const Polygon2& p) { return point_in_polygon(c, p); });
            if (in && std::any_of(exclude.begin(), exclude.end(), [&](const Polygon2& p) { return point_in_polygon(c, p); }))
                in = false;
            mask.at(col, row) = in ? 1.0f : 0.0f;
        }
    return mask;
}

Image rasterize_facade_mask(const Facade& facade, const FacadeFrame& frame, const std::vector<Polygon2>& extra) {
    std::vector<Polygon2> include{project_polygon(facade.polygon, frame)};
    const FacadeFrame own = facade_frame(facade, 1);
    for (const auto& poly : extra) {
        Polygon2 p;
        for (const Vec2& q : poly) p.push_back(frame.to_frame(own.to_world(q)));
        include.push_back(std::move(p));
    }
    return rasterize_polygons(include, occluders_in_frame(facade, frame), frame);
}

FacadeFrame roof_frame(const Roof& roof, int target_resolution) {
    Polygon2 pts;
    for (const auto& face : roof.faces)
        for (const Vec3& p : face) pts.emplace_back(p.x(), p.y());
    if (pts.empty()) throw ValidationError("roof", "roof has no faces");
    return frame_from_bounds(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), bounding_rect(pts), target_resolution);
}

} // namespace mdetail::scene

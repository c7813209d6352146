#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mdetail/geometry2d.hpp"
#include "mdetail/image.hpp"

namespace mdetail::scene {

struct Facade {
    Polygon3 polygon;             ///< meters, counter-clockwise seen from outside
    Vec3 up{0, 0, 1};
    Vec3 normal{0, 1, 0};         ///< outward
    std::vector<Polygon2> occluders;  ///< facade-frame meters

    friend bool operator==(const Facade&, const Facade&) = default;
};

struct Roof {
    std::vector<Polygon3> faces;
    std::vector<Segment3> ridges;
    std::vector<Segment3> valleys;
    std::vector<bool> flat;  ///< one flag per face

    friend bool operator==(const Roof& a, const Roof& b);
};

struct Building {
    std::string id;
    std::vector<Facade> facades;
    Roof roof;

    friend bool operator==(const Building&, const Building&) = default;
};

struct MassModelScene {
    std::vector<Building> buildings;
    std::vector<std::vector<std::string>> blocks;

    const Building* find(const std::string& id) const;
    friend bool operator==(const MassModelScene&, const MassModelScene&) = default;
};

/// Raster parameterization of a planar facade.
///
/// Frame coordinates (u, v) are meters from `origin` along the `u` and `v`
/// axes. The raster has `cols()`×`rows()` pixels anchored at v = 0 on its
/// bottom row; row 0 is the top.
struct FacadeFrame {
    Vec3 origin = Vec3::Zero();
    Vec3 u = Vec3::UnitX();
    Vec3 v = Vec3::UnitZ();
    double width = 0;
    double height = 0;
    double pixels_per_meter = 1;

    int cols() const;
    int rows() const;
    Vec2 to_frame(const Vec3& p) const;
    Vec3 to_world(const Vec2& q) const;
    /// Frame coordinates of the center of pixel (col, row).
    Vec2 pixel_center(int col, int row) const;
    /// Continuous pixel coordinates (col, row) of a frame point.
    Vec2 to_pixel(const Vec2& q) const;

    friend bool operator==(const FacadeFrame&, const FacadeFrame&) = default;
};

MassModelScene parse_scene(const std::string& json_text);
MassModelScene load_scene(const std::filesystem::path& path);
std::string scene_to_json(const MassModelScene& scene);
void save_scene(const MassModelScene& scene, const std::filesystem::path& path);

/// Checks every scene invariant; throws ValidationError naming the field.
void validate_scene(const MassModelScene& scene);

/// Thickness of the vertex set along the declared normal (max − min offset).
double planarity_deviation(const Facade& facade);

/// Horizontal axis of the facade frame: up × normal (points right when the
/// facade is seen from outside).
Vec3 facade_u_axis(const Facade& facade);

/// Frame spanning the facade polygon's AABB, with the longer side mapped to
/// `target_resolution` pixels.
FacadeFrame facade_frame(const Facade& facade, int target_resolution);
/// Frame spanning the facade polygon plus extra frame-space points.
FacadeFrame facade_frame(const Facade& facade, int target_resolution, const std::vector<Polygon2>& extra);

/// Polygon in the given frame's coordinates.
Polygon2 project_polygon(const Polygon3& polygon, const FacadeFrame& frame);
/// Occluders of `facade` re-expressed in `frame` (which may be extended).
std::vector<Polygon2> occluders_in_frame(const Facade& facade, const FacadeFrame& frame);

/// 1 where the pixel center lies inside the facade polygon (or any `extra`
/// polygon) and outside all occluders.
Image rasterize_facade_mask(const Facade& facade, const FacadeFrame& frame, const std::vector<Polygon2>& extra = {});
Image rasterize_polygons(const std::vector<Polygon2>& include, const std::vector<Polygon2>& exclude,
                         const FacadeFrame& frame);

/// Top-down frame over all roof faces (u = +x, v = +y).
FacadeFrame roof_frame(const Roof& roof, int target_resolution);

} // namespace mdetail::scene

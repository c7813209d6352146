#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mdetail/chains/chains.hpp"
#include "mdetail/geometry2d.hpp"
#include "mdetail/image.hpp"
#include "mdetail/labels.hpp"
#include "mdetail/regularize/regularize.hpp"
#include "mdetail/scene/scene.hpp"

namespace mdetail::geometry {

/// Dimensions of the procedural detail programs, in meters (pixels for the feather).
struct DetailProfile {
    double window_inset = 0.12;
    double extrusion = 0.08;
    double balcony_post_spacing = 0.3;
    double balcony_depth = 0.8;
    double balcony_post_radius = 0.02;
    double dormer_default_depth = 1.0;
    double chimney_height = 0.8;
    double roof_window_inset = 0.02;
    int feather_px = 2;
    double height_amplitude = 0.03;
};

/// Triangles generated for one box (or the wall / roof base when box_index is -1).
struct SubMesh {
    std::string label;  ///< provenance: label name, or "wall" / "roof" for the base
    int box_index = -1;
    bool dormer = false;
    std::vector<Vec3> vertices;
    std::vector<Vec2> uvs;  ///< one per vertex, in [0,1]²
    std::vector<std::array<int, 3>> triangles;

    double triangle_area(std::size_t t) const;
};

struct DetailMesh {
    std::vector<SubMesh> parts;
    std::size_t triangle_count() const;
    std::size_t vertex_count() const;
};

/// Post centers of a railing spanning [x, x + width], at most `spacing` apart,
/// kept `radius` inside both ends.
std::vector<double> balcony_post_positions(double x, double width, double spacing, double radius);

/// Wall with openings cut out plus one sub-mesh per box. `outline` is the
/// facade polygon in `frame` coordinates; `roof_faces` bound dormer depth.
DetailMesh synthesize_facade_geometry(const std::vector<regularize::DetailBox>& boxes, const scene::FacadeFrame& frame,
                                      const Polygon2& outline, const std::vector<Polygon3>& roof_faces = {},
                                      const DetailProfile& profile = {});

/// Roof faces plus chimneys and pitched windows. Boxes are top-down in `frame`.
DetailMesh synthesize_roof_geometry(const std::vector<regularize::DetailBox>& boxes, const scene::Roof& roof,
                                    const scene::FacadeFrame& frame, const DetailProfile& profile = {});

// Materials.

struct Material {
    std::string name;
    double glossiness = 0;
    double reflectivity = 0;
    double roughness_weight = 1;  ///< scales the height field of the normal map
};

/// The fixed material table; index = material id.
std::span<const Material> materials();
std::uint8_t material_id(Label label);

struct MaterialMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> ids;

    std::uint8_t at(int x, int y) const { return ids[std::size_t(y) * std::size_t(width) + std::size_t(x)]; }
};

MaterialMap assign_materials(const LabelGrid& labels);
/// Decodes a palette-exact RGB label image first; off-palette colors throw.
MaterialMap assign_materials(const Image& label_rgb);
/// Material ids as a gray image whose 8-bit encoding is the id.
Image material_image(const MaterialMap& map);
std::string materials_json();

// Normal maps.

/// Roughness weight per label, taken from the material table.
std::array<double, kLabelCount> roughness_weights();

/// Height = luminance · weight(label) · amplitude; normals from central
/// differences (one-sided at the border), (0,0,1) where the weight is 0.
/// Returned as a 3-channel image holding the unit vectors.
Image generate_normal_map(const Image& texture, const LabelGrid& labels,
                          const std::array<double, kLabelCount>& weights, double amplitude);

/// Luminance of an RGB pixel in [0,1] units.
double luminance(const Image& rgb, int x, int y);

// Window compositing.

struct MergedMaps {
    Image texture;
    LabelGrid labels;
    std::vector<std::string> warnings;
};

/// Resamples every window result into its box on a texture/label raster of
/// `pixels_per_meter`, feathering the outer `feather_px` pixels linearly.
MergedMaps merge_window_maps(const Image& texture, const LabelGrid& labels, double pixels_per_meter,
                             const std::vector<chains::WindowResult>& windows,
                             const std::vector<regularize::DetailBox>& boxes, int feather_px = 2);

// Export.

/// One textured surface of a building: its mesh and maps.
struct Surface {
    std::string name;  ///< e.g. "facade0", "roof"
    DetailMesh mesh;
    Image texture;
    Image normals;
    MaterialMap materials;
};

/// Writes model.obj, model.mtl, tex_/nrm_/mat_<name>.png and materials.json.
void write_building(const std::filesystem::path& dir, const std::vector<Surface>& surfaces);

} // namespace mdetail::geometry

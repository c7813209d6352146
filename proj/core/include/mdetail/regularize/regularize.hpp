#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mdetail/geometry2d.hpp"
#include "mdetail/image.hpp"
#include "mdetail/labels.hpp"

namespace mdetail::regularize {

enum class BoxSource { raw, snapped, propagated };

std::string_view source_name(BoxSource s);
BoxSource source_from_name(std::string_view name);

/// A fitted detail rectangle in meters, in the frame of its raster (x to the
/// right, y up, origin at the bottom-left corner). Roof features carry a
/// rotation about the rectangle center and the pitch they sit on.
struct DetailBox {
    Label label = Label::window;
    Rect rect;
    double rotation_deg = 0.0;
    BoxSource source = BoxSource::raw;
    int pitch = -1;
    bool dormer = false;

    friend bool operator==(const DetailBox&, const DetailBox&) = default;
};

/// Pixel/meter mapping of a label raster: row 0 is the top edge.
struct RasterGeometry {
    int cols = 0;
    int rows = 0;
    double pixels_per_meter = 1.0;

    double width_m() const { return cols / pixels_per_meter; }
    double height_m() const { return rows / pixels_per_meter; }
    Vec2 pixel_center(int col, int row) const {
        return {(col + 0.5) / pixels_per_meter, (rows - row - 0.5) / pixels_per_meter};
    }
    /// Rectangle covered by the inclusive pixel range.
    Rect pixel_rect(int min_col, int min_row, int max_col, int max_row) const;
    /// Pixels whose centers fall inside `r`, as an inclusive range (may be empty).
    bool pixel_range(const Rect& r, int& min_col, int& min_row, int& max_col, int& max_row) const;
};

struct Component {
    Label label;
    std::vector<std::pair<int, int>> pixels;  ///< (col, row)
    int min_col = 0, max_col = 0, min_row = 0, max_row = 0;
};

/// 4-connected components of one label, in raster scan order of their first pixel.
std::vector<Component> connected_components(const LabelGrid& grid, Label label);

struct MeanShiftConfig {
    double kernel_width = 0.4;  ///< flat kernel spans ±width/2
    int max_iterations = 50;
    double tolerance = 1e-4;
};

/// Result of 1-D flat-kernel mean-shift: distinct modes (ascending, more than
/// one kernel width apart) and the mode index of every sample.
struct ModeFit {
    std::vector<double> modes;
    std::vector<int> assignment;
};

ModeFit mean_shift_1d(std::span<const double> samples, const MeanShiftConfig& config = {});

// Facade windows and doors.

struct WindowConfig {
    MeanShiftConfig mean_shift;
};

/// Fits boxes to window and door components (merging components whose
/// boxes overlap) and snaps their extents and spacings to mean-shift modes.
std::vector<DetailBox> regularize_facade_windows(const LabelGrid& raw, double pixels_per_meter,
                                                 const WindowConfig& config = {});

/// Box-level core of the window regularizer; windows and doors are clustered
/// separately. `bounds` is the frame size in meters. Output order follows input.
/// A box whose snapped rectangle would overlap another keeps its input rectangle.
std::vector<DetailBox> regularize_window_boxes(const std::vector<DetailBox>& boxes, Vec2 bounds,
                                               const WindowConfig& config = {});

/// Groups boxes whose vertical centers lie within half the smaller height
/// of each other. Returns indices into `boxes`, each row sorted by x.
std::vector<std::vector<std::size_t>> group_rows(const std::vector<DetailBox>& boxes);
/// Column analogue of group_rows (sorted by y).
std::vector<std::vector<std::size_t>> group_columns(const std::vector<DetailBox>& boxes);

// Facade details (sills, ledges, moldings, balconies).

struct DetailConfig {
    double snap_distance = 0.15;
};

std::vector<DetailBox> regularize_facade_details(const LabelGrid& full, double pixels_per_meter,
                                                 const std::vector<DetailBox>& windows,
                                                 const DetailConfig& config = {});

/// Box-level core: snap to window edges, then propagate per window row.
std::vector<DetailBox> regularize_detail_boxes(const std::vector<DetailBox>& details,
                                               const std::vector<DetailBox>& windows, Vec2 bounds,
                                               const DetailConfig& config = {});

// Window panes.

inline constexpr double kPaneThreshold = 0.33;

/// Outer product of the thresholded column and row means of a binary mask
/// (nonzero = pane). Output is 0/1, single channel.
Image regularize_window_panes(const Image& mask, double threshold = kPaneThreshold);

/// Label-map form for the window chain: pane pixels where the outer product
/// is set, window elsewhere, background kept.
LabelGrid regularize_pane_labels(const LabelGrid& raw, double threshold = kPaneThreshold);

// Roof features (chimneys, roof windows).

struct RoofPitch {
    Polygon2 outline;            ///< top-down, meters, raster frame
    double gutter_angle_deg = 0; ///< direction of the gutter edge
    bool flat = false;
};

struct RoofLayout {
    std::vector<RoofPitch> pitches;
    std::vector<Rect> dormers;
};

struct RoofConfig {
    double min_radius = 0.25;
    int shrink_iterations = 40;
};

std::vector<DetailBox> regularize_roof_labels(const LabelGrid& raw, double pixels_per_meter,
                                              const RoofLayout& layout, const RoofConfig& config = {});

/// Box-level core: min-size filter, pitch orientation and shrink-to-fit.
std::vector<DetailBox> regularize_roof_boxes(const std::vector<DetailBox>& boxes, const RoofLayout& layout,
                                             const RoofConfig& config = {});

/// The four corners of a (possibly rotated) box, counter-clockwise.
Polygon2 box_corners(const DetailBox& box);

/// Draws boxes into a label raster (rotated boxes by pixel-center test).
void paint_boxes(LabelGrid& grid, const RasterGeometry& raster, std::span<const DetailBox> boxes);

} // namespace mdetail::regularize

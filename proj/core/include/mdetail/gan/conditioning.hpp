#pragma once

#include <vector>

#include "mdetail/image.hpp"

namespace mdetail::gan {

/// Distances in meters per pixel, before normalization.
struct ContextDistances {
    Image left;      ///< to the left side of the mask bounding box
    Image right;
    Image top;
    Image bottom;
    Image boundary;  ///< to the nearest background pixel, 0 outside the mask
};

/// Generator input: content channels (label map or mask), a constant scale
/// channel and five context channels, all in [-1, 1].
struct ConditionedInput {
    Image content;
    Image scale;    ///< 1 channel
    Image context;  ///< 5 channels: left, right, top, bottom, boundary

    int width() const { return content.width(); }
    int height() const { return content.height(); }
    /// Content followed by scale and context, as fed to the generator.
    Image stacked() const;
};

inline constexpr double kDistanceNormalizer = 50.0;  ///< meters mapped to 1
inline constexpr double kScaleNormalizer = 100.0;    ///< pixels-per-meter mapped to 1

/// Meters → [-1, 1] via clamp(m / 50, 0, 1) · 2 − 1.
float normalize_distance(double meters);
/// Pixels-per-meter → [-1, 1] via clamp(ppm / 100, 0, 1) · 2 − 1.
float normalize_scale(double pixels_per_meter);
/// The un-mapped scale value ppm / 100 stored in dataset manifests.
inline double scale_value(double pixels_per_meter) { return pixels_per_meter / kScaleNormalizer; }

/// Exact squared Euclidean distance (in pixels²) from every pixel center to
/// the nearest pixel where `sites` is nonzero. Pixels outside the image
/// count as sites when `outside_is_site` is set.
std::vector<double> squared_distance_transform(const Image& sites, bool outside_is_site);

/// Distance channels for a binary mask: bounding-box sides measured from the
/// pixel center, boundary distance = center-to-center distance to the
/// nearest background pixel minus half a pixel (so pixels touching the
/// boundary read 0.5 px on every channel).
ContextDistances context_distances(const Image& mask, double pixels_per_meter);

/// Builds the conditioned generator input. `mask` is 1 on the facade/roof.
ConditionedInput build_conditioned_input(const Image& content, const Image& mask, double pixels_per_meter);
/// As above, deriving the mask from the content's non-background pixels.
ConditionedInput build_conditioned_input(const Image& content, double pixels_per_meter);

/// 1 where any channel differs from the background color.
Image foreground_mask(const Image& content);

} // namespace mdetail::gan

#pragma once

#include <algorithm>

#include "mdetail/image.hpp"

namespace mdetail::synth {

/// HSV in [0,1] to an image-space color in [-1,1].
Rgb hsv(double h, double s, double v);
/// Adds `amount` to every channel, clamped.
Rgb shade(const Rgb& c, double amount);
/// Writes `c + offset` quantized to the 8-bit grid so PNG round trips are exact.
void put(Image& img, int x, int y, const Rgb& c, double offset);

} // namespace mdetail::synth

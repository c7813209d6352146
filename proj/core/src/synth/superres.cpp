#include <algorithm>
#include <cmath>

#include "color.hpp"
#include "mdetail/synth/synth.hpp"

namespace mdetail::synth {

Image material_patch(bool roof, int resolution, Rng& rng) {
    Image out(resolution, resolution, 3);
    const double noise = 0.04;
    if (!roof) {
        // running-bond brickwork
        const Rgb brick = chance(rng, 0.7) ? hsv(uniform(rng, 0.0, 0.08), uniform(rng, 0.35, 0.7), uniform(rng, 0.35, 0.7))
                                           : hsv(uniform(rng, 0.08, 0.15), uniform(rng, 0.2, 0.5), uniform(rng, 0.55, 0.85));
        const Rgb mortar = hsv(0.1, uniform(rng, 0.0, 0.15), uniform(rng, 0.6, 0.9));
        const int bh = uniform_int(rng, std::max(3, resolution / 12), std::max(4, resolution / 6));
        const int bw = int(bh * uniform(rng, 2.0, 3.0));
        const int joint = std::max(1, bh / 5);
        const int phase = uniform_int(rng, 0, bw);
        std::vector<double> tint(std::size_t((resolution / bh + 2) * (resolution / bw + 3)));
        for (double& t : tint) t = uniform(rng, -0.08, 0.08);
        for (int y = 0; y < resolution; ++y) {
            const int course = y / bh;
            const int shift = (course % 2) * (bw / 2) + phase;
            for (int x = 0; x < resolution; ++x) {
                const int xs = x + shift;
                const bool in_joint = (y % bh) < joint || (xs % bw) < joint;
                const double n = noise * normal(rng);
                if (in_joint) {
                    put(out, x, y, mortar, n);
                } else {
                    const std::size_t id = std::size_t(course * (resolution / bw + 3) + xs / bw) % tint.size();
                    put(out, x, y, brick, tint[id] + n);
                }
            }
        }
        return out;
    }
    // overlapping shingle courses with staggered tabs
    const Rgb tile = hsv(uniform(rng, -0.03, 0.1), uniform(rng, 0.0, 0.6), uniform(rng, 0.2, 0.55));
    const int ch = uniform_int(rng, std::max(3, resolution / 10), std::max(4, resolution / 5));
    const int tw = int(ch * uniform(rng, 0.8, 1.6));
    for (int y = 0; y < resolution; ++y) {
        const int course = y / ch;
        const double rel = double(y % ch) / ch;
        for (int x = 0; x < resolution; ++x) {
            const int xs = x + (course % 2) * (tw / 2);
            const bool gap = (xs % std::max(2, tw)) == 0;
            const double n = noise * normal(rng);
            put(out, x, y, tile, (gap ? -0.25 : 0.0) - 0.2 * rel + n);
        }
    }
    return out;
}

DegradedPair degrade_for_superres(const Image& target, const Image& second, Rng& rng, const DegradeOptions& options) {
    DegradedPair pair;
    pair.target = target;
    Image composed = target;
    const int w = target.width(), h = target.height();
    if (options.second_texture) {
        const double area = double(w) * double(h);
        const double fraction = uniform(rng, 0.10, 0.30);
        const double aspect = uniform(rng, 0.5, 2.0);
        int rw = std::clamp(int(std::lround(std::sqrt(fraction * area * aspect))), 1, w);
        int rh = std::clamp(int(std::lround(fraction * area / rw)), 1, h);
        // integer rounding may leave the allowed band; nudge the height back in
        while (double(rw) * rh / area > 0.30 && rh > 1) --rh;
        while (double(rw) * rh / area < 0.10 && rh < h) ++rh;
        while (double(rw) * rh / area > 0.30 && rw > 1) --rw;
        const int x0 = uniform_int(rng, 0, w - rw);
        const int y0 = uniform_int(rng, 0, h - rh);
        for (int y = y0; y < y0 + rh; ++y)
            for (int x = x0; x < x0 + rw; ++x)
                for (int c = 0; c < target.channels(); ++c)
                    composed.at(x, y, c) = second.at(x % second.width(), y % second.height(), c);
        pair.pasted = Rect{double(x0), double(y0), double(rw), double(rh)};
    }
    pair.sigma = options.sigma ? *options.sigma : uniform(rng, options.sigma_min, options.sigma_max);
    pair.input = gaussian_blur(composed, pair.sigma);
    return pair;
}

} // namespace mdetail::synth

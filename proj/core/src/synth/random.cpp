#include <cmath>

#include "color.hpp"
#include "mdetail/synth/synth.hpp"

namespace mdetail::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * double(rng() >> 11) * 0x1.0p-53; }

int uniform_int(Rng& rng, int lo, int hi) {
    const int v = lo + int(uniform(rng, 0.0, double(hi - lo + 1)));
    return v > hi ? hi : v;
}

bool chance(Rng& rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

double normal(Rng& rng) {
    const double u1 = 1.0 - uniform(rng, 0.0, 1.0);  // (0, 1]
    const double u2 = uniform(rng, 0.0, 1.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Rng sample_rng(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x51ed27ULL)));
}

Rgb hsv(double h, double s, double v) {
    h = h - std::floor(h);
    const double c = v * s;
    const double hp = h * 6.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) r = c, g = x;
    else if (hp < 2) r = x, g = c;
    else if (hp < 3) g = c, b = x;
    else if (hp < 4) g = x, b = c;
    else if (hp < 5) r = x, b = c;
    else r = c, b = x;
    const double m = v - c;
    return {float((r + m) * 2 - 1), float((g + m) * 2 - 1), float((b + m) * 2 - 1)};
}

Rgb shade(const Rgb& c, double amount) {
    return {float(std::clamp(c[0] + amount, -1.0, 1.0)), float(std::clamp(c[1] + amount, -1.0, 1.0)),
            float(std::clamp(c[2] + amount, -1.0, 1.0))};
}

void put(Image& img, int x, int y, const Rgb& c, double offset) {
    for (int k = 0; k < 3; ++k)
        img.at(x, y, k) = from_byte(to_byte(float(std::clamp(c[std::size_t(k)] + offset, -1.0, 1.0))));
}

} // namespace mdetail::synth

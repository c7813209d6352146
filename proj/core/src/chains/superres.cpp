#include <algorithm>
#include <cmath>

#include "mdetail/chains/chains.hpp"

namespace mdetail::chains {

std::vector<int> patch_origins(int length, int patch, int overlap) {
    if (patch <= 0) throw Error("patch_origins: patch must be positive");
    if (overlap < 0 || overlap >= patch) throw Error("patch_origins: overlap must lie in [0, patch)");
    if (length <= patch) return {0};
    const int stride = patch - overlap;
    std::vector<int> out;
    for (int x = 0; x + patch < length; x += stride) out.push_back(x);
    out.push_back(length - patch);
    return out;
}

PatchGrid make_patch_grid(int width, int height, int patch, int overlap) {
    PatchGrid g;
    g.patch = patch;
    g.overlap = overlap;
    g.xs = patch_origins(width, patch, overlap);
    g.ys = patch_origins(height, patch, overlap);
    return g;
}

double ramp_weight(int t, int patch, int overlap, bool first, bool last) {
    double w = 1.0;
    if (!first) w = std::min(w, (t + 0.5) / overlap);
    if (!last) w = std::min(w, (patch - t - 0.5) / overlap);
    return w;
}

Image run_super_resolution(const Image& texture, const style::StyleVector& z, const Network& net, int overlap) {
    if (texture.width() < 8 || texture.height() < 8)
        throw Error("super-resolution: texture is " + std::to_string(texture.width()) + "x" +
                    std::to_string(texture.height()) + ", need at least 8x8");
    if (texture.channels() != 3) throw Error("super-resolution: expected an RGB texture");
    const int patch = net.resolution();
    if (overlap < 2 || overlap >= patch)
        throw Error("super-resolution: overlap " + std::to_string(overlap) + " outside [2, patch)");

    const Image up = resize_bilinear(texture, 2 * texture.width(), 2 * texture.height());
    const int W = up.width(), H = up.height();
    const PatchGrid grid = make_patch_grid(W, H, patch, overlap);

    Image out(W, H, 3);
    std::vector<double> weight_sum(std::size_t(W) * std::size_t(H), 0.0);
    std::vector<double> mean(std::size_t(W) * std::size_t(H) * 3, 0.0);
    for (std::size_t iy = 0; iy < grid.ys.size(); ++iy)
        for (std::size_t ix = 0; ix < grid.xs.size(); ++ix) {
            const int x0 = grid.xs[ix], y0 = grid.ys[iy];
            Image in(patch, patch, 3);
            for (int y = 0; y < patch; ++y)
                for (int x = 0; x < patch; ++x) {
                    const int sx = std::min(W - 1, x0 + x), sy = std::min(H - 1, y0 + y);
                    for (int c = 0; c < 3; ++c) in.at(x, y, c) = up.at(sx, sy, c);
                }
            const Image res = net.translate(in, z);
            const bool fx = ix == 0, lx = ix + 1 == grid.xs.size();
            const bool fy = iy == 0, ly = iy + 1 == grid.ys.size();
            for (int y = 0; y < std::min(patch, H - y0); ++y)
                for (int x = 0; x < std::min(patch, W - x0); ++x) {
                    const double w = ramp_weight(x, patch, overlap, fx, lx) * ramp_weight(y, patch, overlap, fy, ly);
                    const std::size_t p = std::size_t(y0 + y) * std::size_t(W) + std::size_t(x0 + x);
                    weight_sum[p] += w;
                    // Running weighted mean: equal inputs reproduce themselves exactly.
                    const double a = w / weight_sum[p];
                    for (int c = 0; c < 3; ++c) mean[p * 3 + std::size_t(c)] += a * (res.at(x, y, c) - mean[p * 3 + std::size_t(c)]);
                }
        }
    for (std::size_t i = 0; i < mean.size(); ++i) out.data()[i] = float(mean[i]);
    return out;
}

} // namespace mdetail::chains

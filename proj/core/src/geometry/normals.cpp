#include <cmath>

#include "mdetail/geometry/geometry.hpp"

namespace mdetail::geometry {

double luminance(const Image& rgb, int x, int y) {
    const double r = 0.5 * (rgb.at(x, y, 0) + 1.0), g = 0.5 * (rgb.at(x, y, 1) + 1.0), b = 0.5 * (rgb.at(x, y, 2) + 1.0);
    return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}

Image generate_normal_map(const Image& texture, const LabelGrid& labels, const std::array<double, kLabelCount>& weights,
                          double amplitude) {
    if (texture.channels() != 3) throw Error("generate_normal_map: expected an RGB texture");
    if (labels.width != texture.width() || labels.height != texture.height())
        throw Error("generate_normal_map: label raster size differs from the texture");
    const int W = texture.width(), H = texture.height();
    std::vector<double> h(std::size_t(W) * std::size_t(H));
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            h[std::size_t(y) * std::size_t(W) + std::size_t(x)] =
                luminance(texture, x, y) * weights[std::size_t(labels.at(x, y))] * amplitude;
    auto H_at = [&](int x, int y) { return h[std::size_t(y) * std::size_t(W) + std::size_t(x)]; };
    // Central difference inside, one-sided at the border.
    auto diff = [](int i, int n, auto&& f) {
        if (n < 2) return 0.0;
        if (i == 0) return f(1) - f(0);
        if (i == n - 1) return f(n - 1) - f(n - 2);
        return 0.5 * (f(i + 1) - f(i - 1));
    };
    Image out(W, H, 3);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            Vec3 n(0, 0, 1);
            if (weights[std::size_t(labels.at(x, y))] != 0.0) {
                const double dx = diff(x, W, [&](int i) { return H_at(i, y); });
                // Rows grow downwards; the height field's v axis points up.
                const double dy = -diff(y, H, [&](int j) { return H_at(x, j); });
                n = Vec3(-dx, -dy, 1.0).normalized();
            }
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = float(n[c]);
        }
    return out;
}

} // namespace mdetail::geometry

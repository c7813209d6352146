#include "mdetail/gan/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdetail/error.hpp"
#include "mdetail/labels.hpp"

namespace mdetail::gan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// 1-D lower envelope of parabolas (Felzenszwalb & Huttenlocher). `f` holds
/// squared distances (0 at sites, inf elsewhere); result overwrites `d`.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
    const int n = int(f.size());
    int k = 0;
    int first = 0;
    while (first < n && f[std::size_t(first)] == kInf) ++first;
    if (first == n) {
        std::fill(d.begin(), d.end(), kInf);
        return;
    }
    v[0] = first;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = first + 1; q < n; ++q) {
        if (f[std::size_t(q)] == kInf) continue;
        double s;
        for (;;) {
            const int p = v[std::size_t(k)];
            s = ((f[std::size_t(q)] + double(q) * q) - (f[std::size_t(p)] + double(p) * p)) / (2.0 * (q - p));
            if (s <= z[std::size_t(k)]) {
                --k;
                continue;
            }
            break;
        }
        ++k;
        v[std::size_t(k)] = q;
        z[std::size_t(k)] = s;
        z[std::size_t(k) + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[std::size_t(k) + 1] < q) ++k;
        const int p = v[std::size_t(k)];
        d[std::size_t(q)] = double(q - p) * (q - p) + f[std::size_t(p)];
    }
}

} // namespace

float normalize_distance(double meters) {
    return float(std::clamp(meters / kDistanceNormalizer, 0.0, 1.0) * 2.0 - 1.0);
}

float normalize_scale(double pixels_per_meter) {
    return float(std::clamp(pixels_per_meter / kScaleNormalizer, 0.0, 1.0) * 2.0 - 1.0);
}

std::vector<double> squared_distance_transform(const Image& sites, bool outside_is_site) {
    // A one-pixel site frame realizes "outside counts as a site".
    const int pad = outside_is_site ? 1 : 0;
    const int w = sites.width() + 2 * pad, h = sites.height() + 2 * pad;
    std::vector<double> grid(std::size_t(w) * std::size_t(h), outside_is_site ? 0.0 : kInf);
    for (int y = 0; y < sites.height(); ++y)
        for (int x = 0; x < sites.width(); ++x)
            grid[std::size_t(y + pad) * std::size_t(w) + std::size_t(x + pad)] = sites.at(x, y) != 0.0f ? 0.0 : kInf;

    const int n = std::max(w, h);
    std::vector<double> f(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n) + 1);
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int x = 0; x < w; ++x) {
        f.resize(std::size_t(h));
        d.resize(std::size_t(h));
        for (int y = 0; y < h; ++y) f[std::size_t(y)] = grid[std::size_t(y) * std::size_t(w) + std::size_t(x)];
        edt_1d(f, d, v, z);
        for (int y = 0; y < h; ++y) grid[std::size_t(y) * std::size_t(w) + std::size_t(x)] = d[std::size_t(y)];
    }
    for (int y = 0; y < h; ++y) {
        f.assign(grid.begin() + std::ptrdiff_t(std::size_t(y) * std::size_t(w)),
                 grid.begin() + std::ptrdiff_t(std::size_t(y + 1) * std::size_t(w)));
        d.resize(std::size_t(w));
        edt_1d(f, d, v, z);
        std::copy(d.begin(), d.end(), grid.begin() + std::ptrdiff_t(std::size_t(y) * std::size_t(w)));
    }
    std::vector<double> out(std::size_t(sites.width()) * std::size_t(sites.height()));
    for (int y = 0; y < sites.height(); ++y)
        for (int x = 0; x < sites.width(); ++x)
            out[std::size_t(y) * std::size_t(sites.width()) + std::size_t(x)] =
                grid[std::size_t(y + pad) * std::size_t(w) + std::size_t(x + pad)];
    return out;
}

ContextDistances context_distances(const Image& mask, double pixels_per_meter) {
    if (mask.channels() != 1) throw Error("context_distances: mask must have one channel");
    if (!(pixels_per_meter > 0)) throw Error("context_distances: pixels-per-meter must be positive");
    int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y) > 0.5f) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
    if (x1 < 0) throw Error("build_conditioned_input: empty mask");

    Image background(mask.width(), mask.height(), 1);
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) background.at(x, y) = mask.at(x, y) > 0.5f ? 0.0f : 1.0f;
    const std::vector<double> sq = squared_distance_transform(background, true);

    const double mpp = 1.0 / pixels_per_meter;
    ContextDistances out{Image(mask.width(), mask.height(), 1), Image(mask.width(), mask.height(), 1),
                         Image(mask.width(), mask.height(), 1), Image(mask.width(), mask.height(), 1),
                         Image(mask.width(), mask.height(), 1)};
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            const double cx = x + 0.5, cy = y + 0.5;
            out.left.at(x, y) = float(std::max(0.0, cx - x0) * mpp);
            out.right.at(x, y) = float(std::max(0.0, (x1 + 1) - cx) * mpp);
            out.top.at(x, y) = float(std::max(0.0, cy - y0) * mpp);
            out.bottom.at(x, y) = float(std::max(0.0, (y1 + 1) - cy) * mpp);
            const double d = sq[std::size_t(y) * std::size_t(mask.width()) + std::size_t(x)];
            out.boundary.at(x, y) = mask.at(x, y) > 0.5f ? float(std::max(0.0, std::sqrt(d) - 0.5) * mpp) : 0.0f;
        }
    return out;
}

Image ConditionedInput::stacked() const {
    const Image* parts[] = {&content, &scale, &context};
    return concat_channels(parts);
}

Image foreground_mask(const Image& content) {
    const Rgb bg = label_color(Label::background);
    Image mask(content.width(), content.height(), 1);
    for (int y = 0; y < content.height(); ++y)
        for (int x = 0; x < content.width(); ++x) {
            bool fg = false;
            for (int c = 0; c < std::min(3, content.channels()); ++c)
                fg = fg || std::abs(content.at(x, y, c) - bg[std::size_t(c)]) > 1e-3f;
            mask.at(x, y) = fg ? 1.0f : 0.0f;
        }
    return mask;
}

ConditionedInput build_conditioned_input(const Image& content, const Image& mask, double pixels_per_meter) {
    if (mask.width() != content.width() || mask.height() != content.height())
        throw Error("build_conditioned_input: mask not aligned with content");
    const ContextDistances d = context_distances(mask, pixels_per_meter);
    ConditionedInput in;
    in.content = content;
    in.scale = Image(content.width(), content.height(), 1, normalize_scale(pixels_per_meter));
    in.context = Image(content.width(), content.height(), 5);
    const Image* channels[] = {&d.left, &d.right, &d.top, &d.bottom, &d.boundary};
    for (int y = 0; y < content.height(); ++y)
        for (int x = 0; x < content.width(); ++x)
            for (int c = 0; c < 5; ++c) in.context.at(x, y, c) = normalize_distance(channels[c]->at(x, y));
    return in;
}

ConditionedInput build_conditioned_input(const Image& content, double pixels_per_meter) {
    return build_conditioned_input(content, foreground_mask(content), pixels_per_meter);
}

} // namespace mdetail::gan

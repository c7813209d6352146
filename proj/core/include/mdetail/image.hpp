#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace mdetail {

/// Dense float raster in row-major HWC layout. Row 0 is the top of the image.
/// Color images hold values in [-1, 1]; masks hold 0/1.
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, float fill = 0.0f);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t size() const noexcept { return data_.size(); }

    float& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
    float at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

    std::span<float> pixel(int x, int y) { return {data_.data() + index(x, y, 0), std::size_t(channels_)}; }
    std::span<const float> pixel(int x, int y) const {
        return {data_.data() + index(x, y, 0), std::size_t(channels_)};
    }

    std::span<float> data() noexcept { return data_; }
    std::span<const float> data() const noexcept { return data_; }

    void fill(std::span<const float> value);
    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    /// Copies channel `c` into a single-channel image.
    Image channel(int c) const;
    /// Sub-rectangle copy; the rectangle must lie inside the image.
    Image crop(int x0, int y0, int w, int h) const;

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int x, int y, int c) const noexcept {
        return (std::size_t(y) * std::size_t(width_) + std::size_t(x)) * std::size_t(channels_) + std::size_t(c);
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

using Rgb = std::array<float, 3>;

/// Maps an 8-bit channel value to [-1, 1] and back.
inline float from_byte(int v) { return float(v) / 127.5f - 1.0f; }
int to_byte(float v);

/// Concatenates images of equal size along the channel axis.
Image concat_channels(std::span<const Image* const> parts);

/// Bilinear resampling with half-pixel centers and edge clamping.
Image resize_bilinear(const Image& src, int width, int height);
/// Nearest-neighbour resampling (for label rasters).
Image resize_nearest(const Image& src, int width, int height);
/// Separable Gaussian blur, edge clamped. sigma <= 0 returns a copy.
Image gaussian_blur(const Image& src, double sigma);

/// Places `src` on a `width`×`height` canvas anchored bottom-left, filling
/// the remainder with `fill`. Used for the square GAN canvases.
Image pad_bottom_left(const Image& src, int width, int height, std::span<const float> fill);
/// Inverse of pad_bottom_left.
Image crop_bottom_left(const Image& src, int width, int height);

/// Aspect-preserving pad-to-square with `fill` followed by bilinear resize.
Image fit_square(const Image& src, int resolution, std::span<const float> fill);

/// 8-bit PNG I/O. Gray (1 channel), RGB (3) and RGBA (4) are supported;
/// other channel counts are rejected. Values are mapped from [-1, 1] unless
/// `mask` is set, in which case 0/1 maps to 0/255.
void write_png(const std::filesystem::path& path, const Image& image, bool mask = false);
Image read_png(const std::filesystem::path& path, bool mask = false);
std::vector<unsigned char> encode_png(const Image& image, bool mask = false);
Image decode_png(std::span<const unsigned char> bytes, bool mask = false);

} // namespace mdetail

#include "mdetail/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mdetail/error.hpp"

namespace mdetail {

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels <= 0) throw Error("Image: invalid dimensions");
    data_.assign(std::size_t(width) * std::size_t(height) * std::size_t(channels), fill);
}

void Image::fill(std::span<const float> value) {
    if (int(value.size()) != channels_) throw Error("Image::fill: channel count mismatch");
    for (std::size_t i = 0; i < data_.size(); i += std::size_t(channels_))
        std::copy(value.begin(), value.end(), data_.begin() + std::ptrdiff_t(i));
}

Image Image::channel(int c) const {
    Image out(width_, height_, 1);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x) out.at(x, y) = at(x, y, c);
    return out;
}

Image Image::crop(int x0, int y0, int w, int h) const {
    if (x0 < 0 || y0 < 0 || w < 0 || h < 0 || x0 + w > width_ || y0 + h > height_)
        throw Error("Image::crop: rectangle outside image");
    Image out(w, h, channels_);
    for (int y = 0; y < h; ++y)
        std::memcpy(&out.at(0, y), data().data() + (std::size_t(y0 + y) * std::size_t(width_) + std::size_t(x0)) * std::size_t(channels_), sizeof(float) * std::size_t(w * channels_));
    return out;
}

int to_byte(float v) {
    return std::clamp(int(std::lround((double(v) + 1.0) * 127.5)), 0, 255);
}

Image concat_channels(std::span<const Image* const> parts) {
    if (parts.empty()) throw Error("concat_channels: no inputs");
    const int w = parts[0]->width(), h = parts[0]->height();
    int channels = 0;
    for (const Image* p : parts) {
        if (p->width() != w || p->height() != h) throw Error("concat_channels: size mismatch");
        channels += p->channels();
    }
    Image out(w, h, channels);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int c0 = 0;
            for (const Image* p : parts) {
                for (int c = 0; c < p->channels(); ++c) out.at(x, y, c0 + c) = p->at(x, y, c);
                c0 += p->channels();
            }
        }
    return out;
}

Image resize_bilinear(const Image& src, int width, int height) {
    if (src.empty() || width <= 0 || height <= 0) throw Error("resize_bilinear: empty image");
    Image out(width, height, src.channels());
    const double sx = double(src.width()) / width;
    const double sy = double(src.height()) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, double(src.height() - 1));
        const int y0 = int(std::floor(fy));
        const int y1 = std::min(y0 + 1, src.height() - 1);
        const float ty = float(fy - y0);
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, double(src.width() - 1));
            const int x0 = int(std::floor(fx));
            const int x1 = std::min(x0 + 1, src.width() - 1);
            const float tx = float(fx - x0);
            for (int c = 0; c < src.channels(); ++c) {
                const float top = src.at(x0, y0, c) * (1 - tx) + src.at(x1, y0, c) * tx;
                const float bot = src.at(x0, y1, c) * (1 - tx) + src.at(x1, y1, c) * tx;
                out.at(x, y, c) = top * (1 - ty) + bot * ty;
            }
        }
    }
    return out;
}

Image resize_nearest(const Image& src, int width, int height) {
    if (src.empty() || width <= 0 || height <= 0) throw Error("resize_nearest: empty image");
    Image out(width, height, src.channels());
    for (int y = 0; y < height; ++y) {
        const int sy = std::min(int((y + 0.5) * src.height() / height), src.height() - 1);
        for (int x = 0; x < width; ++x) {
            const int sx = std::min(int((x + 0.5) * src.width() / width), src.width() - 1);
            for (int c = 0; c < src.channels(); ++c) out.at(x, y, c) = src.at(sx, sy, c);
        }
    }
    return out;
}

Image gaussian_blur(const Image& src, double sigma) {
    if (sigma <= 0.0) return src;
    const int radius = std::max(1, int(std::ceil(3.0 * sigma)));
    std::vector<float> kernel(std::size_t(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * i * i / (sigma * sigma));
        kernel[std::size_t(i + radius)] = float(v);
        sum += v;
    }
    for (float& k : kernel) k = float(k / sum);

    Image tmp(src.width(), src.height(), src.channels());
    Image out(src.width(), src.height(), src.channels());
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x)
            for (int c = 0; c < src.channels(); ++c) {
                float acc = 0;
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[std::size_t(i + radius)] * src.at(std::clamp(x + i, 0, src.width() - 1), y, c);
                tmp.at(x, y, c) = acc;
            }
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x)
            for (int c = 0; c < src.channels(); ++c) {
                float acc = 0;
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[std::size_t(i + radius)] * tmp.at(x, std::clamp(y + i, 0, src.height() - 1), c);
                out.at(x, y, c) = acc;
            }
    return out;
}

Image pad_bottom_left(const Image& src, int width, int height, std::span<const float> fill) {
    if (src.width() > width || src.height() > height) throw Error("pad_bottom_left: source larger than canvas");
    Image out(width, height, src.channels());
    out.fill(fill);
    const int dy = height - src.height();
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x)
            for (int c = 0; c < src.channels(); ++c) out.at(x, y + dy, c) = src.at(x, y, c);
    return out;
}

Image crop_bottom_left(const Image& src, int width, int height) {
    return src.crop(0, src.height() - height, width, height);
}

Image fit_square(const Image& src, int resolution, std::span<const float> fill) {
    const int side = std::max(src.width(), src.height());
    Image square = pad_bottom_left(src, side, side, fill);
    if (side == resolution) return square;
    return resize_bilinear(square, resolution, resolution);
}

namespace {

png_uint_32 format_for(int channels) {
    switch (channels) {
    case 1: return PNG_FORMAT_GRAY;
    case 3: return PNG_FORMAT_RGB;
    case 4: return PNG_FORMAT_RGBA;
    default: throw Error("PNG: unsupported channel count " + std::to_string(channels));
    }
}

} // namespace

std::vector<unsigned char> encode_png(const Image& image, bool mask) {
    png_image desc{};
    desc.version = PNG_IMAGE_VERSION;
    desc.width = png_uint_32(image.width());
    desc.height = png_uint_32(image.height());
    desc.format = format_for(image.channels());
    std::vector<png_byte> pixels(image.data().size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const float v = image.data()[i];
        pixels[i] = mask ? png_byte(v > 0.5f ? 255 : 0) : png_byte(to_byte(v));
    }
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&desc, nullptr, &size, 0, pixels.data(), 0, nullptr))
        throw Error(std::string("PNG: encoding failed: ") + desc.message);
    std::vector<unsigned char> buffer(size);
    if (!png_image_write_to_memory(&desc, buffer.data(), &size, 0, pixels.data(), 0, nullptr))
        throw Error(std::string("PNG: encoding failed: ") + desc.message);
    buffer.resize(size);
    return buffer;
}

void write_png(const std::filesystem::path& path, const Image& image, bool mask) {
    const auto bytes = encode_png(image, mask);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("PNG: cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

Image decode_png(std::span<const unsigned char> bytes, bool mask) {
    png_image desc{};
    desc.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&desc, bytes.data(), bytes.size()))
        throw Error(std::string("PNG: cannot decode: ") + desc.message);
    const bool gray = (desc.format & PNG_FORMAT_FLAG_COLOR) == 0;
    const bool alpha = (desc.format & PNG_FORMAT_FLAG_ALPHA) != 0;
    const int channels = gray && !alpha ? 1 : (alpha && !gray ? 4 : 3);
    desc.format = format_for(channels);
    std::vector<png_byte> pixels(PNG_IMAGE_SIZE(desc));
    if (!png_image_finish_read(&desc, nullptr, pixels.data(), 0, nullptr))
        throw Error(std::string("PNG: cannot decode: ") + desc.message);
    Image out(int(desc.width), int(desc.height), channels);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const int v = pixels[i];
        out.data()[i] = mask ? (v > 127 ? 1.0f : 0.0f) : from_byte(v);
    }
    return out;
}

Image read_png(const std::filesystem::path& path, bool mask) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("PNG: cannot open " + path.string());
    const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), {}};
    try {
        return decode_png(bytes, mask);
    } catch (const Error& e) {
        throw Error(std::string(e.what()) + " (" + path.string() + ")");
    }
}

} // namespace mdetail

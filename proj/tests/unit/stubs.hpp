#pragma once

// Deterministic stand-ins for the nine networks and small test helpers.

#include <cmath>
#include <filesystem>
#include <memory>
#include <string>

#include "mdetail/chains/chains.hpp"
#include "mdetail/gan/tasks.hpp"
#include "mdetail/labels.hpp"

namespace mdetail::test {

inline std::filesystem::path data_dir() { return MDETAIL_TEST_DATA_DIR; }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("mdetail-unit-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline bool same_color(const Image& img, int x, int y, Label label, int offset = 0) {
    const Rgb c = label_color(label);
    for (int k = 0; k < 3; ++k)
        if (std::abs(img.at(x, y, offset + k) - c[std::size_t(k)]) > 1e-3f) return false;
    return true;
}

inline void put_color(Image& img, int x, int y, Label label) {
    const Rgb c = label_color(label);
    for (int k = 0; k < 3; ++k) img.at(x, y, k) = c[std::size_t(k)];
}

/// Mean color of an image as a style vector (first three components).
class StubEncoder : public style::StyleEncoder {
public:
    explicit StubEncoder(int resolution) : resolution_(resolution) {}
    int resolution() const override { return resolution_; }
    style::StyleVector encode_mean(const Image& image) const override {
        style::StyleVector z;
        for (int c = 0; c < 3; ++c) {
            double s = 0;
            for (int y = 0; y < image.height(); ++y)
                for (int x = 0; x < image.width(); ++x) s += image.at(x, y, c);
            z[c] = s / (image.width() * image.height());
        }
        return z;
    }

private:
    int resolution_;
};

/// Paints fixed patterns so that chain outputs are predictable:
/// window labels form a grid on wall pixels, full labels add one-pixel sills
/// under windows, pane labels form a grid inside the window, textures are
/// the content shifted by the first style component, super-resolution and
/// roof labels are identities.
class StubNetwork : public chains::Network {
public:
    StubNetwork(gan::Task task, int resolution) : task_(task), encoder_(resolution), resolution_(resolution) {}

    int resolution() const override { return resolution_; }
    const style::StyleEncoder* encoder() const override {
        return gan::task_info(task_).styled ? &encoder_ : nullptr;
    }

    Image translate(const Image& input, const style::StyleVector& z) const override {
        const int w = input.width(), h = input.height();
        Image out(w, h, 3);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                for (int c = 0; c < 3; ++c) out.at(x, y, c) = input.at(x, y, c);
                switch (task_) {
                case gan::Task::facade_window_labels:
                    if (same_color(input, x, y, Label::wall) && x % 8 >= 2 && x % 8 <= 5 && y % 10 >= 2 && y % 10 <= 6)
                        put_color(out, x, y, Label::window);
                    break;
                case gan::Task::facade_full_labels:
                    for (int c = 0; c < 3; ++c) out.at(x, y, c) = input.at(x, y, 3 + c);
                    if (y > 0 && same_color(input, x, y, Label::wall, 3) && same_color(input, x, y - 1, Label::window, 3))
                        put_color(out, x, y, Label::sill);
                    break;
                case gan::Task::window_labels:
                    if (same_color(input, x, y, Label::window))
                        put_color(out, x, y, x % 6 >= 1 && x % 6 <= 4 && y % 8 >= 1 && y % 8 <= 6 ? Label::pane : Label::window);
                    break;
                case gan::Task::facade_textures:
                case gan::Task::roof_textures:
                case gan::Task::window_textures:
                    for (int c = 0; c < 3; ++c)
                        out.at(x, y, c) = float(std::clamp(0.5 * input.at(x, y, c) + 0.1 * z[0], -1.0, 1.0));
                    break;
                default:
                    break;
                }
            }
        return out;
    }

private:
    gan::Task task_;
    StubEncoder encoder_;
    int resolution_;
};

inline std::shared_ptr<chains::FixedNetworks> stub_networks(int resolution = 32) {
    auto nets = std::make_shared<chains::FixedNetworks>();
    for (const auto& info : gan::all_tasks()) nets->set(info.task, std::make_shared<StubNetwork>(info.task, resolution));
    return nets;
}

} // namespace mdetail::test

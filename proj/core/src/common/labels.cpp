#include "mdetail/labels.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "mdetail/error.hpp"

namespace mdetail {

namespace {

constexpr std::array<PaletteEntry, kLabelCount> kPalette{{
    {Label::background, "background", {0, 0, 0}},
    {Label::wall, "wall", {0, 0, 255}},
    {Label::window, "window", {0, 255, 255}},
    {Label::door, "door", {255, 0, 0}},
    {Label::sill, "sill", {255, 255, 0}},
    {Label::ledge, "ledge", {255, 128, 0}},
    {Label::molding, "molding", {128, 0, 255}},
    {Label::balcony, "balcony", {0, 255, 0}},
    {Label::pane, "pane", {0, 128, 128}},
    {Label::roof, "roof", {128, 128, 128}},
    {Label::flat_roof, "flat_roof", {0, 128, 0}},
    {Label::ridge, "ridge", {255, 255, 255}},
    {Label::valley, "valley", {128, 0, 0}},
    {Label::chimney, "chimney", {255, 0, 255}},
    {Label::roof_window, "roof_window", {255, 128, 128}},
}};

} // namespace

std::span<const PaletteEntry> palette() { return kPalette; }

std::string_view label_name(Label label) { return kPalette[std::size_t(label)].name; }

std::optional<Label> label_from_name(std::string_view name) {
    for (const auto& e : kPalette)
        if (e.name == name) return e.label;
    return std::nullopt;
}

Rgb label_color(Label label) {
    const auto& c = kPalette[std::size_t(label)].rgb;
    return {from_byte(c[0]), from_byte(c[1]), from_byte(c[2])};
}

std::size_t LabelGrid::count(Label l) const { return std::size_t(std::count(labels.begin(), labels.end(), l)); }

LabelGrid quantize(const Image& rgb, std::span<const Label> allowed) {
    if (rgb.channels() != 3) throw Error("quantize: expected a 3-channel image");
    if (allowed.empty()) throw Error("quantize: empty label set");
    std::vector<Rgb> colors;
    for (Label l : allowed) colors.push_back(label_color(l));
    LabelGrid out(rgb.width(), rgb.height(), allowed.front());
    for (int y = 0; y < rgb.height(); ++y)
        for (int x = 0; x < rgb.width(); ++x) {
            float best = std::numeric_limits<float>::max();
            std::size_t best_i = 0;
            for (std::size_t i = 0; i < colors.size(); ++i) {
                float d = 0;
                for (int c = 0; c < 3; ++c) {
                    const float t = rgb.at(x, y, c) - colors[i][std::size_t(c)];
                    d += t * t;
                }
                if (d < best) {
                    best = d;
                    best_i = i;
                }
            }
            out.at(x, y) = allowed[best_i];
        }
    return out;
}

LabelGrid decode_labels(const Image& rgb) {
    if (rgb.channels() != 3) throw Error("decode_labels: expected a 3-channel image");
    LabelGrid out(rgb.width(), rgb.height(), Label::background);
    for (int y = 0; y < rgb.height(); ++y)
        for (int x = 0; x < rgb.width(); ++x) {
            const int r = to_byte(rgb.at(x, y, 0)), g = to_byte(rgb.at(x, y, 1)), b = to_byte(rgb.at(x, y, 2));
            const auto it = std::find_if(kPalette.begin(), kPalette.end(), [&](const PaletteEntry& e) {
                return e.rgb[0] == r && e.rgb[1] == g && e.rgb[2] == b;
            });
            if (it == kPalette.end())
                throw Error("decode_labels: off-palette color at (" + std::to_string(x) + "," + std::to_string(y) + ")");
            out.at(x, y) = it->label;
        }
    return out;
}

Image render_labels(const LabelGrid& grid) {
    Image out(grid.width, grid.height, 3);
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) {
            const Rgb c = label_color(grid.at(x, y));
            for (int k = 0; k < 3; ++k) out.at(x, y, k) = c[std::size_t(k)];
        }
    return out;
}

Image label_mask(const LabelGrid& grid, Label label) {
    Image out(grid.width, grid.height, 1);
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) out.at(x, y) = grid.at(x, y) == label ? 1.0f : 0.0f;
    return out;
}

} // namespace mdetail

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mdetail/image.hpp"

namespace mdetail {

/// Semantic classes shared by every label raster in the pipeline.
enum class Label : std::uint8_t {
    background,
    wall,
    window,
    door,
    sill,
    ledge,
    molding,
    balcony,
    pane,
    roof,
    flat_roof,
    ridge,
    valley,
    chimney,
    roof_window,
};

inline constexpr int kLabelCount = 15;

struct PaletteEntry {
    Label label;
    std::string_view name;
    std::array<std::uint8_t, 3> rgb;
};

/// The fixed label palette (8-bit sRGB values).
std::span<const PaletteEntry> palette();

std::string_view label_name(Label label);
std::optional<Label> label_from_name(std::string_view name);
Rgb label_color(Label label);

/// Label subsets each chain stage is allowed to emit.
namespace label_sets {
inline constexpr std::array kFacadeWindows{Label::background, Label::wall, Label::window, Label::door};
inline constexpr std::array kFacadeFull{Label::background, Label::wall,    Label::window, Label::door,
                                        Label::sill,       Label::ledge,   Label::molding, Label::balcony};
inline constexpr std::array kWindowPanes{Label::background, Label::window, Label::pane};
inline constexpr std::array kRoofDetails{Label::background, Label::roof,    Label::flat_roof, Label::ridge,
                                         Label::valley,     Label::chimney, Label::roof_window};
} // namespace label_sets

/// Per-pixel label indices with the originating raster size.
struct LabelGrid {
    int width = 0;
    int height = 0;
    std::vector<Label> labels;

    LabelGrid() = default;
    LabelGrid(int w, int h, Label fill) : width(w), height(h), labels(std::size_t(w) * std::size_t(h), fill) {}

    Label& at(int x, int y) { return labels[std::size_t(y) * std::size_t(width) + std::size_t(x)]; }
    Label at(int x, int y) const { return labels[std::size_t(y) * std::size_t(width) + std::size_t(x)]; }
    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width && y < height; }
    std::size_t count(Label l) const;

    friend bool operator==(const LabelGrid&, const LabelGrid&) = default;
};

/// Nearest palette color in RGB Euclidean distance, restricted to `allowed`.
LabelGrid quantize(const Image& rgb, std::span<const Label> allowed);
/// Exact decode of a palette-exact image; throws on any off-palette pixel.
LabelGrid decode_labels(const Image& rgb);
/// Renders labels with their palette colors into a 3-channel image in [-1, 1].
Image render_labels(const LabelGrid& grid);

/// Binary mask (0/1, single channel) of pixels carrying `label`.
Image label_mask(const LabelGrid& grid, Label label);

} // namespace mdetail

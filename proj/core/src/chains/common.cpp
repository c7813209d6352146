#include <algorithm>

#include "internal.hpp"

namespace mdetail::chains {

namespace detail {

Image translate_on_canvas(const Network& net, gan::Task task, const Image& content, const Image& mask,
                          double pixels_per_meter, const style::StyleVector& z) {
    const int R = net.resolution();
    if (content.width() > R || content.height() > R)
        throw Error("raster " + std::to_string(content.width()) + "x" + std::to_string(content.height()) +
                    " does not fit the " + std::to_string(R) + "px canvas");
    const Rgb bg = label_color(Label::background);
    std::vector<float> fill;
    for (int c = 0; c < content.channels(); ++c) fill.push_back(bg[std::size_t(c % 3)]);
    const Image padded = pad_bottom_left(content, R, R, fill);
    const float zero = 0.0f;
    const Image padded_mask = pad_bottom_left(mask, R, R, std::span<const float>(&zero, 1));
    const Image input = gan::task_info(task).conditioned
                            ? gan::build_conditioned_input(padded, padded_mask, pixels_per_meter).stacked()
                            : padded;
    return crop_bottom_left(net.translate(input, z), content.width(), content.height());
}

void clear_outside(Image& rgb, const Image& mask) {
    const Rgb bg = label_color(Label::background);
    for (int y = 0; y < rgb.height(); ++y)
        for (int x = 0; x < rgb.width(); ++x)
            if (mask.at(x, y) == 0.0f)
                for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = bg[std::size_t(c)];
}

LabelGrid mask_labels(const Image& mask, Label inside) {
    LabelGrid g(mask.width(), mask.height(), Label::background);
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y) != 0.0f) g.at(x, y) = inside;
    return g;
}

} // namespace detail

LabelGrid quantize_masked(const Image& output, std::span<const Label> allowed, const Image& mask, Label fill) {
    if (mask.width() != output.width() || mask.height() != output.height())
        throw Error("quantize_masked: mask size differs from the output");
    LabelGrid g = quantize(output, allowed);
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            Label& l = g.at(x, y);
            if (mask.at(x, y) == 0.0f)
                l = Label::background;
            else if (l == Label::background)
                l = fill;
        }
    return g;
}

Image augment_labels(const Image& texture, const LabelGrid& labels, Label label, Rgb color, double alpha) {
    if (labels.width != texture.width() || labels.height != texture.height())
        throw Error("augment_labels: label raster size differs from the texture");
    Image out = texture;
    const float a = float(alpha);
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
            if (labels.at(x, y) == label)
                for (int c = 0; c < 3; ++c) out.at(x, y, c) = (1.0f - a) * out.at(x, y, c) + a * color[std::size_t(c)];
    return out;
}

std::vector<regularize::DetailBox> detail::clip_to_frame(std::vector<regularize::DetailBox> boxes, double width,
                                                        double height) {
    constexpr double kMinSize = 1e-6;
    std::vector<regularize::DetailBox> out;
    for (auto& b : boxes) {
        const double x0 = std::max(0.0, b.rect.x), y0 = std::max(0.0, b.rect.y);
        const double x1 = std::min(width, b.rect.right()), y1 = std::min(height, b.rect.top());
        if (x1 - x0 < kMinSize || y1 - y0 < kMinSize) continue;
        b.rect = {x0, y0, x1 - x0, y1 - y0};
        out.push_back(b);
    }
    return out;
}

} // namespace mdetail::chains

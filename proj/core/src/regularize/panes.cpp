#include "mdetail/regularize/regularize.hpp"

namespace mdetail::regularize {

Image regularize_window_panes(const Image& mask, double threshold) {
    const int w = mask.width(), h = mask.height();
    std::vector<int> col_count(std::size_t(w), 0), row_count(std::size_t(h), 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.at(x, y) != 0.0f) {
                ++col_count[std::size_t(x)];
                ++row_count[std::size_t(y)];
            }
    Image out(w, h, 1, 0.0f);
    for (int y = 0; y < h; ++y) {
        if (double(row_count[std::size_t(y)]) / w < threshold) continue;
        for (int x = 0; x < w; ++x)
            if (double(col_count[std::size_t(x)]) / h >= threshold) out.at(x, y) = 1.0f;
    }
    return out;
}

LabelGrid regularize_pane_labels(const LabelGrid& raw, double threshold) {
    const Image panes = regularize_window_panes(label_mask(raw, Label::pane), threshold);
    LabelGrid out = raw;
    for (int y = 0; y < raw.height; ++y)
        for (int x = 0; x < raw.width; ++x) {
            if (panes.at(x, y) != 0.0f)
                out.at(x, y) = Label::pane;
            else if (out.at(x, y) == Label::pane)
                out.at(x, y) = Label::window;
        }
    return out;
}

} // namespace mdetail::regularize

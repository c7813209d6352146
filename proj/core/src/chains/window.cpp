#include <algorithm>
#include <cmath>

#include "internal.hpp"

namespace mdetail::chains {

using gan::Task;

std::optional<WindowResult> run_window_chain(const regularize::DetailBox& box, double facade_ppm,
                                             const style::BuildingStyle& style, NetworkSet& nets) {
    if (box.rect.w * facade_ppm < 4.0 || box.rect.h * facade_ppm < 4.0) return std::nullopt;
    const auto pane_net = nets.get(Task::window_labels);
    const int R = pane_net->resolution();
    WindowResult w;
    w.box = box;
    w.pixels_per_meter = R / std::max(box.rect.w, box.rect.h);
    const regularize::RasterGeometry raster{R, R, w.pixels_per_meter};
    const Rect outline{0, 0, box.rect.w, box.rect.h};

    Image mask(R, R, 1, 0.0f);
    int cols = 0, rows = 0;
    for (int y = 0; y < R; ++y)
        for (int x = 0; x < R; ++x)
            if (outline.contains(raster.pixel_center(x, y))) {
                mask.at(x, y) = 1.0f;
                cols = std::max(cols, x + 1);
                rows = std::max(rows, R - y);
            }
    if (cols == 0 || rows == 0) return std::nullopt;

    const Image out = detail::translate_on_canvas(*pane_net, Task::window_labels,
                                                  render_labels(detail::mask_labels(mask, Label::window)), mask,
                                                  w.pixels_per_meter, detail::style_for(Task::window_labels, style));
    const LabelGrid raw = quantize_masked(out, label_sets::kWindowPanes, mask, Label::window);
    LabelGrid crop(cols, rows, Label::window);
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x) crop.at(x, y) = raw.at(x, R - rows + y);
    w.panes = regularize::regularize_pane_labels(crop);

    LabelGrid canvas_panes = detail::mask_labels(mask, Label::window);
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x) canvas_panes.at(x, R - rows + y) = w.panes.at(x, y);
    const auto tex_net = nets.get(Task::window_textures);
    Image tex = detail::translate_on_canvas(*tex_net, Task::window_textures, render_labels(canvas_panes), mask,
                                            w.pixels_per_meter, detail::style_for(Task::window_textures, style));
    detail::clear_outside(tex, mask);
    w.texture = crop_bottom_left(tex, cols, rows);
    return w;
}

void run_window_chains(FacadeChainResult& facade, const style::BuildingStyle& style, NetworkSet& nets,
                       const ChainOptions&) {
    detail::run_stage("window", "windows", facade.timings, [&] {
        for (std::size_t i = 0; i < facade.windows.size(); ++i) {
            const auto& box = facade.windows[i];
            if (box.label != Label::window) continue;
            auto res = run_window_chain(box, facade.frame.pixels_per_meter, style, nets);
            if (!res) {
                facade.warnings.push_back("window " + std::to_string(i) + " skipped: smaller than 4 px");
                continue;
            }
            res->index = int(i);
            facade.window_results.push_back(std::move(*res));
        }
    });
}

} // namespace mdetail::chains

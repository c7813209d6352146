#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "mdetail/chains/chains.hpp"
#include "mdetail/gan/conditioning.hpp"

namespace mdetail::chains::detail {

/// Style vector a task consumes; unstyled tasks get the zero vector.
inline style::StyleVector style_for(gan::Task task, const style::BuildingStyle& style) {
    const auto& p = gan::task_info(task).property;
    return p ? style[*p] : style::StyleVector();
}

/// Runs one named stage, records its wall time and prefixes errors with the
/// stage name. Missing checkpoints propagate unchanged.
template <typename F>
auto run_stage(const char* chain, const char* stage, std::vector<StageTiming>& timings, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto record = [&] {
        timings.push_back({stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
    };
    try {
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record();
        } else {
            auto out = fn();
            record();
            return out;
        }
    } catch (const MissingCheckpointError&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(std::string(chain) + " chain, stage " + stage + ": " + e.what());
    }
}

inline Image background_canvas(int width, int height) {
    const Rgb bg = label_color(Label::background);
    Image out(width, height, 3);
    out.fill(bg);
    return out;
}

/// Runs a network on a frame-raster input placed bottom-left on its square
/// canvas and returns the frame-raster part of the output.
Image translate_on_canvas(const Network& net, gan::Task task, const Image& content, const Image& mask,
                          double pixels_per_meter, const style::StyleVector& z);

/// Sets every pixel outside `mask` to the background color.
void clear_outside(Image& rgb, const Image& mask);

/// Clips boxes to the frame rectangle, which the raster overhangs by up to a
/// pixel; boxes left without area are dropped.
std::vector<regularize::DetailBox> clip_to_frame(std::vector<regularize::DetailBox> boxes, double width, double height);

/// Label raster: `inside` where the mask is set, background elsewhere.
LabelGrid mask_labels(const Image& mask, Label inside);

} // namespace mdetail::chains::detail

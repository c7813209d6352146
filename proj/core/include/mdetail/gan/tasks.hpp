#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "mdetail/labels.hpp"
#include "mdetail/style/style.hpp"

namespace mdetail::gan {

/// The nine image-to-image networks of the detailing cascade.
enum class Task {
    roof_labels,
    roof_textures,
    facade_window_labels,
    facade_textures,
    facade_full_labels,
    window_labels,
    window_textures,
    facade_superres,
    roof_superres,
};

inline constexpr int kTaskCount = 9;

struct TaskInfo {
    Task task;
    std::string_view name;
    int full_resolution;     ///< resolution used by the original networks
    int desk_resolution;     ///< default resolution here
    int full_epochs;
    bool styled;             ///< takes a style vector (BicycleGAN) vs. Pix2Pix
    bool conditioned;        ///< scale + 5 context channels appended
    bool label_output;       ///< output is quantized to a label set
    int content_channels;    ///< channels of A before conditioning
    std::optional<style::Property> property;
    std::span<const Label> output_labels;  ///< empty for textures
};

const TaskInfo& task_info(Task task);
std::optional<Task> task_from_name(std::string_view name);
std::span<const TaskInfo> all_tasks();

/// Channels fed to the generator (content + optional 6 conditioning).
inline int input_channels(const TaskInfo& info) { return info.content_channels + (info.conditioned ? 6 : 0); }

} // namespace mdetail::gan

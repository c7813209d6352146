#include "mdetail/gan/tasks.hpp"

namespace mdetail::gan {

namespace {

using style::Property;

// Resolutions and epochs of the original setup; desk resolutions are the
// scaled-down defaults used for training here.
const std::array<TaskInfo, kTaskCount> kTasks{{
    {Task::roof_labels, "roof-labels", 512, 128, 400, true, true, true, 3, Property::roof_detail_layout,
     label_sets::kRoofDetails},
    {Task::roof_textures, "roof-textures", 512, 128, 400, true, true, false, 3, Property::roof_texture, {}},
    {Task::facade_window_labels, "facade-window-labels", 256, 64, 400, true, true, true, 3,
     Property::facade_window_layout, label_sets::kFacadeWindows},
    {Task::facade_textures, "facade-textures", 256, 64, 150, true, true, false, 3, Property::facade_texture, {}},
    {Task::facade_full_labels, "facade-full-labels", 256, 64, 335, false, true, true, 6, std::nullopt,
     label_sets::kFacadeFull},
    {Task::window_labels, "window-labels", 256, 64, 200, true, true, true, 3, Property::window_pane_layout,
     label_sets::kWindowPanes},
    {Task::window_textures, "window-textures", 256, 64, 400, true, true, false, 3, Property::window_texture, {}},
    {Task::facade_superres, "facade-superres", 256, 64, 600, true, false, false, 3, Property::facade_texture_detail,
     {}},
    {Task::roof_superres, "roof-superres", 256, 64, 600, true, false, false, 3, Property::roof_texture_detail, {}},
}};

} // namespace

const TaskInfo& task_info(Task task) { return kTasks[std::size_t(task)]; }

std::optional<Task> task_from_name(std::string_view name) {
    for (const auto& t : kTasks)
        if (t.name == name) return t.task;
    return std::nullopt;
}

std::span<const TaskInfo> all_tasks() { return kTasks; }

} // namespace mdetail::gan

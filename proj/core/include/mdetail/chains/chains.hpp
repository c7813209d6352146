#pragma once

#include <chrono>
#include <filesystem>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mdetail/error.hpp"
#include "mdetail/gan/conditioning.hpp"
#include "mdetail/gan/tasks.hpp"
#include "mdetail/image.hpp"
#include "mdetail/labels.hpp"
#include "mdetail/regularize/regularize.hpp"
#include "mdetail/scene/scene.hpp"
#include "mdetail/style/style.hpp"

namespace mdetail::gan {
class GanModel;
}

namespace mdetail::chains {

/// An image-to-image network as the chains see it.
class Network {
public:
    virtual ~Network() = default;
    virtual int resolution() const = 0;
    /// `input` is resolution² with the task's input channels; returns RGB.
    virtual Image translate(const Image& input, const style::StyleVector& z) const = 0;
    /// Style encoder of the network, or null when it has none.
    virtual const style::StyleEncoder* encoder() const { return nullptr; }
};

/// Adapter over a trained GAN.
class GanNetwork : public Network {
public:
    explicit GanNetwork(std::shared_ptr<const gan::GanModel> model);
    int resolution() const override;
    Image translate(const Image& input, const style::StyleVector& z) const override;
    const style::StyleEncoder* encoder() const override;
    const gan::GanModel& model() const { return *model_; }

private:
    std::shared_ptr<const gan::GanModel> model_;
};

class MissingCheckpointError : public Error {
public:
    MissingCheckpointError(gan::Task task, const std::filesystem::path& path);
    gan::Task task() const noexcept { return task_; }

private:
    gan::Task task_;
};

/// Source of the nine networks.
class NetworkSet {
public:
    virtual ~NetworkSet() = default;
    virtual std::shared_ptr<const Network> get(gan::Task task) = 0;
};

/// Loads `<dir>/<task-name>.ckpt` on demand and keeps at most
/// `max_resident` networks in memory (0 keeps all of them), evicting the
/// least recently used one. Thread-safe.
class CheckpointNetworks : public NetworkSet {
public:
    explicit CheckpointNetworks(std::filesystem::path dir, int max_resident = 0);
    std::shared_ptr<const Network> get(gan::Task task) override;
    /// Throws MissingCheckpointError for the first task without a checkpoint.
    void require_all() const;
    int resident() const;
    int loads() const;
    static std::filesystem::path checkpoint_path(const std::filesystem::path& dir, gan::Task task);

private:
    std::filesystem::path dir_;
    int max_resident_;
    mutable std::mutex mutex_;
    std::list<gan::Task> lru_;
    std::map<gan::Task, std::shared_ptr<const Network>> cache_;
    int loads_ = 0;
};

/// In-memory networks, mostly for tests.
class FixedNetworks : public NetworkSet {
public:
    void set(gan::Task task, std::shared_ptr<const Network> net);
    std::shared_ptr<const Network> get(gan::Task task) override;

private:
    std::map<gan::Task, std::shared_ptr<const Network>> nets_;
};

struct ChainOptions {
    int superres_overlap = 8;
    double label_augment_alpha = 0.35;
    regularize::WindowConfig windows;
    regularize::DetailConfig details;
    regularize::RoofConfig roof;
};

struct StageTiming {
    std::string stage;
    double seconds = 0;
};

/// Super-resolution patch layout over a width×height image.
struct PatchGrid {
    int patch = 0;
    int overlap = 0;
    std::vector<int> xs;  ///< patch origins along x
    std::vector<int> ys;
    std::size_t count() const { return xs.size() * ys.size(); }
};

/// Origins along one axis of length `length`: stride patch − overlap, the
/// last patch snapped to end at the border.
std::vector<int> patch_origins(int length, int patch, int overlap);
PatchGrid make_patch_grid(int width, int height, int patch, int overlap);

/// Upsamples ×2 (bilinear), translates overlapping patches with a fixed
/// style and blends them with linear ramps that sum to one.
Image run_super_resolution(const Image& texture, const style::StyleVector& z, const Network& net, int overlap);

/// Per-pixel blend weight of a patch pixel at offset t along one axis.
double ramp_weight(int t, int patch, int overlap, bool first, bool last);

struct WindowResult {
    int index = 0;        ///< position in the facade's window box list
    regularize::DetailBox box;
    double pixels_per_meter = 0;
    LabelGrid panes;      ///< window-sized crop: window frame + panes
    Image texture;        ///< window-sized crop
};

struct FacadeChainResult {
    scene::FacadeFrame frame;
    int resolution = 0;
    bool empty = false;
    Image mask;                 ///< frame raster, 1 channel
    LabelGrid window_labels;    ///< regularized windows/doors
    LabelGrid labels;           ///< final regularized full label map
    Image coarse;               ///< texture GAN output (frame raster)
    Image hires;                ///< 2× super-resolved texture
    std::vector<regularize::DetailBox> windows;  ///< windows and doors, facade frame meters
    std::vector<regularize::DetailBox> details;
    std::vector<WindowResult> window_results;
    std::vector<std::string> warnings;
    std::vector<StageTiming> timings;
};

struct RoofChainResult {
    scene::FacadeFrame frame;  ///< top-down
    int resolution = 0;
    LabelGrid coarse_labels;
    LabelGrid labels;
    Image coarse;
    Image hires;
    regularize::RoofLayout layout;
    std::vector<regularize::DetailBox> features;
    std::vector<StageTiming> timings;
};

/// Roof faces adjacent to the facade projected onto its plane, in the
/// facade's own AABB frame. Flat faces project to nothing.
std::vector<Polygon2> project_roof_onto_facade(const scene::Building& building, std::size_t facade_index);

/// Facade chain: window labels → regularize → texture → full labels → regularize → super-resolution.
/// `roof_projection` polygons (facade AABB frame) extend the mask; windows
/// whose centers fall there are tagged as dormers.
FacadeChainResult run_facade_chain(const scene::Facade& facade, const std::vector<Polygon2>& roof_projection,
                                   const style::BuildingStyle& style, NetworkSet& nets,
                                   const ChainOptions& options = {});

/// Replaces the regularized boxes of a facade result and re-runs the texture
/// and super-resolution stages; the label GANs are not re-run. Existing window
/// results stay attached to their box index.
void apply_facade_boxes(FacadeChainResult& result, const std::vector<regularize::DetailBox>& windows,
                        const std::vector<regularize::DetailBox>& details, const style::BuildingStyle& style,
                        NetworkSet& nets, const ChainOptions& options = {});

/// Runs the window chain on every window box of a facade result.
void run_window_chains(FacadeChainResult& facade, const style::BuildingStyle& style, NetworkSet& nets,
                       const ChainOptions& options = {});

/// Window chain for one box (meters). Returns nothing for boxes under 4 px.
std::optional<WindowResult> run_window_chain(const regularize::DetailBox& box, double facade_ppm,
                                             const style::BuildingStyle& style, NetworkSet& nets);

/// Top-down coarse roof labels on the frame raster: roof / flat roof, ridge
/// and valley strokes.
LabelGrid coarse_roof_labels(const scene::Roof& roof, const scene::FacadeFrame& frame);
/// Pitch outlines (top-down, frame meters) with gutter orientation.
regularize::RoofLayout roof_layout(const scene::Roof& roof, const scene::FacadeFrame& frame);

/// Top-down footprints of dormer windows of a facade, in the roof frame.
std::vector<Rect> dormer_footprints(const scene::Building& building, std::size_t facade_index,
                                    const FacadeChainResult& facade, const scene::FacadeFrame& roof_frame);

RoofChainResult run_roof_chain(const scene::Roof& roof, const std::vector<Rect>& dormers,
                               const style::BuildingStyle& style, NetworkSet& nets,
                               const ChainOptions& options = {});

/// Quantizes a GAN label output; pixels outside `mask` become background and
/// background inside it becomes `fill`.
LabelGrid quantize_masked(const Image& output, std::span<const Label> allowed, const Image& mask, Label fill);

/// Alpha-composites a flat color over the pixels carrying `label`.
Image augment_labels(const Image& texture, const LabelGrid& labels, Label label, Rgb color, double alpha);

/// Writes the facade chain layout under `dir` (mask, windows, labels, coarse,
/// hires, windows/<n>/{panes,texture}, meta.json).
void write_facade_result(const std::filesystem::path& dir, const FacadeChainResult& result,
                         const style::BuildingStyle& style);
void write_roof_result(const std::filesystem::path& dir, const RoofChainResult& result);

} // namespace mdetail::chains

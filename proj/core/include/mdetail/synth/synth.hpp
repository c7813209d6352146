#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include "mdetail/gan/model.hpp"
#include "mdetail/gan/tasks.hpp"
#include "mdetail/image.hpp"
#include "mdetail/labels.hpp"
#include "mdetail/regularize/regularize.hpp"

namespace mdetail::synth {

using Rng = std::mt19937_64;

/// Uniform double in [lo, hi) built from raw engine bits, so sequences are
/// identical across standard libraries.
double uniform(Rng& rng, double lo, double hi);
/// Uniform integer in [lo, hi].
int uniform_int(Rng& rng, int lo, int hi);
bool chance(Rng& rng, double p);
/// Standard normal via Box-Muller on `uniform`.
double normal(Rng& rng);
/// Independent stream for sample `index` of a dataset with `seed`.
Rng sample_rng(std::uint64_t seed, std::uint64_t index);

struct Knobs {
    double floor_height_min = 2.5;
    double floor_height_max = 4.0;
    int floors_min = 2;
    int floors_max = 5;
    int window_columns_min = 2;
    int window_columns_max = 6;
    int pane_columns_min = 1;
    int pane_columns_max = 4;
    int pane_rows_min = 1;
    int pane_rows_max = 5;
    double wall_saturation_min = 0.15;
    double wall_saturation_max = 0.65;
    double wall_value_min = 0.35;
    double wall_value_max = 0.9;
    double noise = 0.03;  ///< per-pixel texture noise amplitude (image units)
};

struct DatasetSpec {
    gan::Task task = gan::Task::facade_textures;
    int count = 100;
    int resolution = 0;  ///< 0 selects the task's desk resolution
    std::uint64_t seed = 1;
    Knobs knobs;

    int effective_resolution() const;
};

/// One generated example. `extra` holds the second condition of the full
/// label task (window labels); `pixels_per_meter` drives the scale channel.
struct Sample {
    Image a;
    Image b;
    std::optional<Image> extra;
    double pixels_per_meter = 1.0;
};

// Procedural facades.

struct FacadeColors {
    Rgb wall, glass, door, trim, balcony;
};

struct FacadeLayout {
    double width = 0, height = 0;
    double floor_height = 3;
    int floors = 0;
    Polygon2 outline;  ///< meters, bottom-left origin
    std::vector<Rect> occluders;
    std::vector<regularize::DetailBox> openings;  ///< windows and doors
    std::vector<regularize::DetailBox> details;   ///< sills, ledges, moldings, balconies
    FacadeColors colors;
};

FacadeLayout random_facade(Rng& rng, const Knobs& knobs);

/// Raster of a facade layout on a resolution² canvas, bottom-left anchored,
/// ppm = resolution / max(width, height).
struct FacadeRasters {
    double pixels_per_meter = 1;
    Image mask;              ///< 1 channel
    LabelGrid window_labels; ///< background / wall / window / door
    LabelGrid full_labels;   ///< adds sill / ledge / molding / balcony
    Image texture;
};

FacadeRasters render_facade(const FacadeLayout& layout, int resolution, Rng& rng, double noise);

// Procedural roofs (top-down).

enum class RoofKind { flat, gable, hip };

struct RoofLayoutSynth {
    RoofKind kind = RoofKind::gable;
    double width = 0, depth = 0;
    std::vector<std::pair<Vec2, Vec2>> ridges;  ///< ridge and hip lines
    regularize::RoofLayout pitches;
    std::vector<regularize::DetailBox> features;  ///< chimneys, roof windows
    Rgb tile, chimney, glass;
};

RoofLayoutSynth random_roof(Rng& rng, const Knobs& knobs);

struct RoofRasters {
    double pixels_per_meter = 1;
    LabelGrid coarse;   ///< roof / flat roof / ridge lines
    LabelGrid details;  ///< coarse plus chimneys and roof windows
    Image texture;
};

RoofRasters render_roof(const RoofLayoutSynth& layout, int resolution, Rng& rng, double noise);
/// Line thickness used for ridge/valley strokes, in meters.
inline constexpr double kRidgeStroke = 0.25;

// Procedural windows.

struct WindowLayout {
    double width = 1, height = 1.5;
    std::vector<std::pair<double, double>> pane_columns;  ///< [x0, x1) in meters
    std::vector<std::pair<double, double>> pane_rows;     ///< [y0, y1)
    Rgb frame, glass;
};

WindowLayout random_window(Rng& rng, const Knobs& knobs);

struct WindowRasters {
    double pixels_per_meter = 1;
    LabelGrid mask_labels;  ///< window fill, background padding
    LabelGrid pane_labels;  ///< window frame + panes
    Image texture;
};

WindowRasters render_window(const WindowLayout& layout, int resolution, Rng& rng, double noise);

// Super-resolution degradation.

struct DegradeOptions {
    double sigma_min = 1.0;
    double sigma_max = 4.0;
    bool second_texture = true;
    std::optional<double> sigma;  ///< forces the blur width
};

struct DegradedPair {
    Image input;
    Image target;
    double sigma = 0;
    std::optional<Rect> pasted;  ///< pixel rectangle of the second texture
};

/// Composites `second` into a random rectangle covering 10-30% of the
/// target, then blurs.
DegradedPair degrade_for_superres(const Image& target, const Image& second, Rng& rng, const DegradeOptions& options = {});

/// Procedural hi-res material patch (bricks for facades, shingles for roofs).
Image material_patch(bool roof, int resolution, Rng& rng);

// Datasets.

std::vector<Sample> generate_samples(const DatasetSpec& spec);
Sample generate_sample(const DatasetSpec& spec, int index);

/// Turns a sample into a training pair: content, conditioning channels and target.
gan::TrainPair to_train_pair(gan::Task task, const Sample& sample);
std::vector<gan::TrainPair> to_train_pairs(gan::Task task, const std::vector<Sample>& samples);

/// Writes `<root>/<task>/{A,B[,C]}/NNNNN.png` and manifest.json.
std::filesystem::path write_dataset(const std::filesystem::path& root, const DatasetSpec& spec);

struct Dataset {
    gan::Task task;
    DatasetSpec spec;
    std::vector<Sample> samples;
};

/// Loads a dataset directory written by write_dataset (or the CMP importer).
Dataset load_dataset(const std::filesystem::path& task_dir);

/// Imports CMP-style facade label maps (indexed PNGs with the CMP class ids)
/// as facade-window-labels pairs. Returns the number of samples written.
int import_cmp_labels(const std::filesystem::path& cmp_dir, const std::filesystem::path& root, int resolution,
                      double facade_height_m = 15.0);

} // namespace mdetail::synth

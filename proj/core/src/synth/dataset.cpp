#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "color.hpp"
#include "mdetail/error.hpp"
#include "mdetail/gan/conditioning.hpp"
#include "mdetail/synth/synth.hpp"

namespace mdetail::synth {

using gan::Task;
using nlohmann::json;

namespace {

Image mask_as_labels(const Image& mask) {
    LabelGrid g(mask.width(), mask.height(), Label::background);
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y) != 0.0f) g.at(x, y) = Label::wall;
    return render_labels(g);
}

void quantize_bytes(Image& img) {
    for (float& v : img.data()) v = from_byte(to_byte(v));
}

std::string file_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%05d.png", index);
    return buf;
}

json knobs_to_json(const Knobs& k) {
    return {{"floor_height_min", k.floor_height_min}, {"floor_height_max", k.floor_height_max},
            {"floors_min", k.floors_min},             {"floors_max", k.floors_max},
            {"window_columns_min", k.window_columns_min}, {"window_columns_max", k.window_columns_max},
            {"pane_columns_min", k.pane_columns_min}, {"pane_columns_max", k.pane_columns_max},
            {"pane_rows_min", k.pane_rows_min},       {"pane_rows_max", k.pane_rows_max},
            {"wall_saturation_min", k.wall_saturation_min}, {"wall_saturation_max", k.wall_saturation_max},
            {"wall_value_min", k.wall_value_min},     {"wall_value_max", k.wall_value_max},
            {"noise", k.noise}};
}

Knobs knobs_from_json(const json& j) {
    Knobs k;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("floor_height_min", k.floor_height_min);
    get("floor_height_max", k.floor_height_max);
    get("floors_min", k.floors_min);
    get("floors_max", k.floors_max);
    get("window_columns_min", k.window_columns_min);
    get("window_columns_max", k.window_columns_max);
    get("pane_columns_min", k.pane_columns_min);
    get("pane_columns_max", k.pane_columns_max);
    get("pane_rows_min", k.pane_rows_min);
    get("pane_rows_max", k.pane_rows_max);
    get("wall_saturation_min", k.wall_saturation_min);
    get("wall_saturation_max", k.wall_saturation_max);
    get("wall_value_min", k.wall_value_min);
    get("wall_value_max", k.wall_value_max);
    get("noise", k.noise);
    return k;
}

} // namespace

int DatasetSpec::effective_resolution() const {
    return resolution > 0 ? resolution : gan::task_info(task).desk_resolution;
}

Sample generate_sample(const DatasetSpec& spec, int index) {
    Rng rng = sample_rng(spec.seed, std::uint64_t(index));
    const int res = spec.effective_resolution();
    const Knobs& k = spec.knobs;
    Sample s;
    switch (spec.task) {
    case Task::facade_window_labels:
    case Task::facade_textures:
    case Task::facade_full_labels: {
        const FacadeLayout layout = random_facade(rng, k);
        const FacadeRasters r = render_facade(layout, res, rng, k.noise);
        s.pixels_per_meter = r.pixels_per_meter;
        if (spec.task == Task::facade_window_labels) {
            s.a = mask_as_labels(r.mask);
            s.b = render_labels(r.window_labels);
        } else if (spec.task == Task::facade_textures) {
            s.a = render_labels(r.window_labels);
            s.b = r.texture;
        } else {
            s.a = r.texture;
            s.extra = render_labels(r.window_labels);
            s.b = render_labels(r.full_labels);
        }
        break;
    }
    case Task::roof_labels:
    case Task::roof_textures: {
        const RoofLayoutSynth layout = random_roof(rng, k);
        const RoofRasters r = render_roof(layout, res, rng, k.noise);
        s.pixels_per_meter = r.pixels_per_meter;
        s.a = render_labels(spec.task == Task::roof_labels ? r.coarse : r.details);
        s.b = spec.task == Task::roof_labels ? render_labels(r.details) : r.texture;
        break;
    }
    case Task::window_labels:
    case Task::window_textures: {
        const WindowLayout layout = random_window(rng, k);
        const WindowRasters r = render_window(layout, res, rng, k.noise);
        s.pixels_per_meter = r.pixels_per_meter;
        s.a = render_labels(spec.task == Task::window_labels ? r.mask_labels : r.pane_labels);
        s.b = spec.task == Task::window_labels ? render_labels(r.pane_labels) : r.texture;
        break;
    }
    case Task::facade_superres:
    case Task::roof_superres: {
        const bool roof = spec.task == Task::roof_superres;
        const Image target = material_patch(roof, res, rng);
        const Image second = material_patch(roof, res, rng);
        DegradedPair pair = degrade_for_superres(target, second, rng);
        quantize_bytes(pair.input);
        s.a = pair.input;
        s.b = pair.target;
        s.pixels_per_meter = 1.0;
        break;
    }
    }
    return s;
}

std::vector<Sample> generate_samples(const DatasetSpec& spec) {
    std::vector<Sample> out;
    out.reserve(std::size_t(spec.count));
    for (int i = 0; i < spec.count; ++i) out.push_back(generate_sample(spec, i));
    return out;
}

gan::TrainPair to_train_pair(Task task, const Sample& sample) {
    const auto& info = gan::task_info(task);
    Image content = sample.a;
    if (sample.extra) {
        const Image* parts[] = {&sample.a, &*sample.extra};
        content = concat_channels(parts);
    }
    if (content.channels() != info.content_channels)
        throw Error(std::string("sample for ") + std::string(info.name) + " has " + std::to_string(content.channels()) +
                    " content channels, expected " + std::to_string(info.content_channels));
    Image input = content;
    if (info.conditioned) {
        const Image mask = gan::foreground_mask(sample.extra ? *sample.extra : sample.a);
        input = gan::build_conditioned_input(content, mask, sample.pixels_per_meter).stacked();
    }
    return {std::move(input), std::move(content), sample.b};
}

std::vector<gan::TrainPair> to_train_pairs(Task task, const std::vector<Sample>& samples) {
    std::vector<gan::TrainPair> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(to_train_pair(task, s));
    return out;
}

namespace {

void write_manifest(const std::filesystem::path& dir, const DatasetSpec& spec, const std::vector<Sample>& samples) {
    json manifest;
    manifest["task"] = std::string(gan::task_info(spec.task).name);
    manifest["count"] = spec.count;
    manifest["resolution"] = spec.effective_resolution();
    manifest["seed"] = spec.seed;
    manifest["knobs"] = knobs_to_json(spec.knobs);
    json list = json::array();
    for (std::size_t i = 0; i < samples.size(); ++i)
        list.push_back({{"file", file_name(int(i))},
                        {"scale", gan::scale_value(samples[i].pixels_per_meter)},
                        {"pixels_per_meter", samples[i].pixels_per_meter}});
    manifest["samples"] = list;
    std::ofstream out(dir / "manifest.json");
    if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
}

} // namespace

std::filesystem::path write_dataset(const std::filesystem::path& root, const DatasetSpec& spec) {
    const auto dir = root / std::string(gan::task_info(spec.task).name);
    std::filesystem::create_directories(dir / "A");
    std::filesystem::create_directories(dir / "B");
    const std::vector<Sample> samples = generate_samples(spec);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto name = file_name(int(i));
        write_png(dir / "A" / name, samples[i].a);
        write_png(dir / "B" / name, samples[i].b);
        if (samples[i].extra) {
            std::filesystem::create_directories(dir / "C");
            write_png(dir / "C" / name, *samples[i].extra);
        }
    }
    write_manifest(dir, spec, samples);
    return dir;
}

Dataset load_dataset(const std::filesystem::path& task_dir) {
    const auto manifest_path = task_dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw Error("dataset manifest not found: " + manifest_path.string());
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw ParseError("manifest.json", e.what());
    }
    Dataset ds;
    const std::string task_name = manifest.at("task").get<std::string>();
    const auto task = gan::task_from_name(task_name);
    if (!task) throw ParseError("task", "unknown task '" + task_name + "'");
    ds.task = *task;
    ds.spec.task = *task;
    ds.spec.count = manifest.value("count", 0);
    ds.spec.resolution = manifest.value("resolution", 0);
    ds.spec.seed = manifest.value("seed", std::uint64_t(0));
    if (manifest.contains("knobs")) ds.spec.knobs = knobs_from_json(manifest["knobs"]);
    for (const auto& entry : manifest.at("samples")) {
        const std::string name = entry.at("file").get<std::string>();
        Sample s;
        s.a = read_png(task_dir / "A" / name);
        s.b = read_png(task_dir / "B" / name);
        if (std::filesystem::exists(task_dir / "C" / name)) s.extra = read_png(task_dir / "C" / name);
        s.pixels_per_meter = entry.contains("pixels_per_meter") ? entry["pixels_per_meter"].get<double>()
                                                                 : entry.at("scale").get<double>() * gan::kScaleNormalizer;
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

namespace {

// Class colors of the CMP facade label maps (12 classes, jet colormap).
struct CmpClass {
    std::array<int, 3> rgb;
    Label label;
};
constexpr std::array<CmpClass, 12> kCmpClasses{{
    {{0, 0, 170}, Label::background},   // background
    {{0, 0, 255}, Label::wall},         // facade
    {{0, 85, 255}, Label::window},      // window
    {{0, 170, 255}, Label::door},       // door
    {{0, 255, 255}, Label::ledge},      // cornice
    {{85, 255, 170}, Label::sill},      // sill
    {{170, 255, 85}, Label::balcony},   // balcony
    {{255, 255, 0}, Label::window},     // blind
    {{255, 170, 0}, Label::wall},       // deco
    {{255, 85, 0}, Label::molding},     // molding
    {{255, 0, 0}, Label::wall},         // pillar
    {{170, 0, 0}, Label::door},         // shop
}};

Label cmp_label(int r, int g, int b) {
    int best = 0;
    long best_d = -1;
    for (std::size_t i = 0; i < kCmpClasses.size(); ++i) {
        const auto& c = kCmpClasses[i].rgb;
        const long d = long(r - c[0]) * (r - c[0]) + long(g - c[1]) * (g - c[1]) + long(b - c[2]) * (b - c[2]);
        if (best_d < 0 || d < best_d) {
            best_d = d;
            best = int(i);
        }
    }
    return kCmpClasses[std::size_t(best)].label;
}

} // namespace

int import_cmp_labels(const std::filesystem::path& cmp_dir, const std::filesystem::path& root, int resolution,
                      double facade_height_m) {
    if (!std::filesystem::is_directory(cmp_dir)) throw Error("CMP directory not found: " + cmp_dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(cmp_dir))
        if (e.path().extension() == ".png") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    DatasetSpec spec;
    spec.task = Task::facade_window_labels;
    spec.resolution = resolution;
    spec.seed = 0;
    std::vector<Sample> samples;
    for (const auto& f : files) {
        const Image rgb = read_png(f);
        if (rgb.channels() < 3) continue;
        LabelGrid full(rgb.width(), rgb.height(), Label::background);
        for (int y = 0; y < rgb.height(); ++y)
            for (int x = 0; x < rgb.width(); ++x)
                full.at(x, y) = cmp_label(to_byte(rgb.at(x, y, 0)), to_byte(rgb.at(x, y, 1)), to_byte(rgb.at(x, y, 2)));
        LabelGrid windows = full;
        Image mask(full.width, full.height, 1, 0.0f);
        for (std::size_t i = 0; i < full.labels.size(); ++i) {
            const Label l = full.labels[i];
            if (l != Label::background) mask.data()[i] = 1.0f;
            if (l != Label::background && l != Label::window && l != Label::door) windows.labels[i] = Label::wall;
        }
        const std::array<float, 3> bg{-1.0f, -1.0f, -1.0f};
        const int side = std::max(full.width, full.height);
        Sample s;
        s.a = resize_nearest(pad_bottom_left(mask_as_labels(mask), side, side, bg), resolution, resolution);
        s.b = resize_nearest(pad_bottom_left(render_labels(windows), side, side, bg), resolution, resolution);
        const double meters_per_pixel = facade_height_m / full.height;
        s.pixels_per_meter = resolution / (side * meters_per_pixel);
        samples.push_back(std::move(s));
    }
    spec.count = int(samples.size());
    const auto dir = root / std::string(gan::task_info(spec.task).name);
    std::filesystem::create_directories(dir / "A");
    std::filesystem::create_directories(dir / "B");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        write_png(dir / "A" / file_name(int(i)), samples[i].a);
        write_png(dir / "B" / file_name(int(i)), samples[i].b);
    }
    write_manifest(dir, spec, samples);
    return spec.count;
}

} // namespace mdetail::synth

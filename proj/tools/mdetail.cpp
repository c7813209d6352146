#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mdetail/chains/chains.hpp"
#include "mdetail/gan/model.hpp"
#include "mdetail/scene/scene.hpp"
#include "mdetail/service/pipeline.hpp"
#include "mdetail/service/server.hpp"
#include "mdetail/synth/synth.hpp"

namespace fs = std::filesystem;
using namespace mdetail;
using nlohmann::json;

namespace {

/// Exit codes: 1 for usage and input errors, 2 for training divergence.
constexpr int kExitError = 1;
constexpr int kExitDivergence = 2;

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path model_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("MDETAIL_MODEL_DIR")) return env;
    return "models";
}

std::string task_names() {
    std::string out;
    for (const auto& info : gan::all_tasks()) out += (out.empty() ? "" : ", ") + std::string(info.name);
    return out;
}

/// Resolves a --task value; "all" expands to every task. Empty on a bad name.
std::vector<gan::Task> parse_tasks(const std::string& name) {
    if (name == "all") {
        std::vector<gan::Task> out;
        for (const auto& info : gan::all_tasks()) out.push_back(info.task);
        return out;
    }
    if (const auto t = gan::task_from_name(name)) return {*t};
    return {};
}

int bad_task(const CLI::App& cmd, const std::string& name) {
    std::cerr << "error: unknown task '" << name << "' (expected one of: " << task_names() << ", all)\n\n"
              << cmd.help();
    return kExitError;
}

struct TrainArgs {
    std::string task;
    std::string data;
    std::string config;
    std::string out;
    int epochs = -1;
    int count = 200;
    int resolution = 0;
    std::uint64_t seed = 1;
};

int run_train(const CLI::App& cmd, const TrainArgs& a) {
    const auto tasks = parse_tasks(a.task);
    if (tasks.empty()) return bad_task(cmd, a.task);
    const fs::path out = model_dir(a.out);
    fs::create_directories(out);
    for (gan::Task task : tasks) {
        const auto& info = gan::task_info(task);
        gan::TrainConfig cfg = gan::TrainConfig::for_task(task);
        if (!a.config.empty()) cfg = gan::config_from_json(read_text(a.config), cfg);
        if (a.epochs >= 0) cfg.epochs = a.epochs;
        cfg.seed = a.seed;

        std::vector<synth::Sample> samples;
        if (!a.data.empty()) {
            const auto ds = synth::load_dataset(fs::path(a.data) / std::string(info.name));
            if (ds.task != task) throw Error("dataset under " + a.data + " is not for task " + std::string(info.name));
            samples = ds.samples;
        } else {
            synth::DatasetSpec spec;
            spec.task = task;
            spec.count = a.count;
            spec.resolution = a.resolution;
            spec.seed = a.seed;
            samples = synth::generate_samples(spec);
        }
        if (samples.empty()) throw Error("no training samples for task " + std::string(info.name));
        cfg.net.resolution = samples.front().b.width();
        const std::size_t n_val = std::max<std::size_t>(1, samples.size() / 5);
        std::vector<synth::Sample> val(samples.end() - std::ptrdiff_t(std::min(n_val, samples.size())), samples.end());
        if (samples.size() > n_val) samples.resize(samples.size() - n_val);

        gan::GanModel model(task, cfg);
        gan::TrainOptions options;
        options.on_epoch = [&](const gan::EpochLosses& e) {
            std::cout << info.name << " epoch " << e.epoch << ": L_D " << e.d << " L_GAN " << e.gan << " L1 " << e.l1
                      << " KL " << e.kl << " LR " << e.lr << " | val L1 " << e.val_l1 << " KL/dim " << e.val_kl_per_dim
                      << std::endl;
        };
        const auto history =
            model.train(synth::to_train_pairs(task, samples), synth::to_train_pairs(task, val), options);
        const auto ckpt = chains::CheckpointNetworks::checkpoint_path(out, task);
        model.save(ckpt);
        gan::write_loss_csv(out / (std::string(info.name) + "-loss.csv"), history);
        gan::write_validation_csv(out / (std::string(info.name) + "-val.csv"), history);
        std::cout << "wrote " << ckpt.string() << "\n";
    }
    return 0;
}

struct GenArgs {
    std::string task;
    std::string out = "data";
    int count = 200;
    int resolution = 0;
    std::uint64_t seed = 1;
};

int run_gen_data(const CLI::App& cmd, const GenArgs& a) {
    const auto tasks = parse_tasks(a.task);
    if (tasks.empty()) return bad_task(cmd, a.task);
    for (gan::Task task : tasks) {
        synth::DatasetSpec spec;
        spec.task = task;
        spec.count = a.count;
        spec.resolution = a.resolution;
        spec.seed = a.seed;
        std::cout << "wrote " << synth::write_dataset(a.out, spec).string() << "\n";
    }
    return 0;
}

/// Optional detail settings file: superres_overlap, label_augment_alpha,
/// feather_px, max_resident.
struct DetailSettings {
    service::DetailOptions options;
    int max_resident = 0;
};

DetailSettings load_detail_settings(const std::string& path) {
    DetailSettings s;
    if (path.empty()) return s;
    json j;
    try {
        j = json::parse(read_text(path));
        s.options.chain.superres_overlap = j.value("superres_overlap", s.options.chain.superres_overlap);
        s.options.chain.label_augment_alpha = j.value("label_augment_alpha", s.options.chain.label_augment_alpha);
        s.options.profile.feather_px = j.value("feather_px", s.options.profile.feather_px);
        s.max_resident = j.value("max_resident", 0);
    } catch (const json::exception& e) {
        throw ParseError(path, e.what());
    }
    return s;
}

style::StyleDistribution load_distribution(const std::string& path) {
    if (path.empty()) return {};
    return style::parse_distribution(read_text(path));
}

std::vector<std::size_t> parse_blocks(const std::string& text, std::size_t count) {
    std::vector<std::size_t> out;
    if (text == "all") {
        for (std::size_t i = 0; i < count; ++i) out.push_back(i);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stoul(item));
        } catch (const std::exception&) {
            throw ParseError("blocks", "expected comma-separated block indices, got '" + item + "'");
        }
    }
    return out;
}

struct DetailArgs {
    std::string scene;
    std::string distribution;
    std::string blocks = "all";
    std::string out = "out";
    std::string models;
    std::string config;
    std::uint64_t seed = 0;
    bool checksum = false;
};

int run_detail(const DetailArgs& a) {
    const auto scene = scene::load_scene(a.scene);
    scene::validate_scene(scene);
    const auto blocks = parse_blocks(a.blocks, scene.blocks.size());
    auto settings = load_detail_settings(a.config);
    settings.options.seed = a.seed;
    if (!a.distribution.empty()) settings.options.exemplar_dir = fs::path(a.distribution).parent_path();
    chains::CheckpointNetworks nets(model_dir(a.models), settings.max_resident);
    if (!blocks.empty()) nets.require_all();
    const auto table = service::detail_scene(scene, blocks, load_distribution(a.distribution), nets, a.out,
                                             settings.options, [](const std::string& b, const std::string& stage) {
                                                 std::cerr << b << ": " << stage << "\n";
                                             });
    std::cout << table.to_text();
    if (a.checksum) std::cout << "checksum " << service::combined_checksum(a.out) << "\n";
    return 0;
}

struct PreviewArgs {
    std::string distribution;
    std::string property;
    std::string out = "preview";
    std::string models;
    int n = 4;
    std::uint64_t seed = 0;
};

int run_preview(const PreviewArgs& a) {
    const auto property = style::property_from_name(a.property);
    if (!property) throw ParseError("property", "unknown property '" + a.property + "'");
    chains::CheckpointNetworks nets(model_dir(a.models));
    auto dist = load_distribution(a.distribution);
    style::resolve_exemplars(dist, [&](style::Property p, const std::string& exemplar) {
        return service::encode_exemplar_source(p, exemplar, nets, fs::path(a.distribution).parent_path());
    });
    const auto preview = service::preview_samples(dist, *property, a.n, a.seed, nets);
    const fs::path out(a.out);
    fs::create_directories(out);
    write_png(out / "input_content.png",
              preview.content.channels() == 3 ? preview.content : preview.content.channel(0));
    write_png(out / "input_mask.png", preview.mask, true);
    if (preview.conditioned) {
        write_png(out / "input_scale.png", preview.conditioned->scale);
        const char* names[] = {"left", "right", "top", "bottom", "boundary"};
        for (int c = 0; c < 5; ++c)
            write_png(out / ("input_" + std::string(names[c]) + ".png"), preview.conditioned->context.channel(c));
    }
    json styles = json::array();
    for (std::size_t i = 0; i < preview.images.size(); ++i) {
        write_png(out / ("sample_" + std::to_string(i) + ".png"), preview.images[i]);
        styles.push_back(preview.styles[i].values());
    }
    std::ofstream(out / "styles.json") << styles.dump(2) << "\n";
    std::cout << "wrote " << preview.images.size() << " samples of " << a.property << " to " << out.string() << "\n";
    return 0;
}

int run_stats(const std::string& path) {
    fs::path p(path);
    if (fs::is_directory(p)) p /= "stats.json";
    std::cout << service::StatsTable::from_json(read_text(p)).to_text();
    return 0;
}

struct ServeArgs {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string models;
    std::string out = "mdetail-service";
    int workers = 1;
    int max_resident = 0;
};

int run_serve(const ServeArgs& a) {
    auto nets = std::make_shared<chains::CheckpointNetworks>(model_dir(a.models), a.max_resident);
    service::ServiceConfig config;
    config.out_dir = a.out;
    config.workers = a.workers;
    service::Service svc(nets, config);
    std::cout << "listening on http://" << a.host << ":" << a.port << std::endl;
    svc.run(a.host, a.port);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detail mass models with chained image-to-image GANs", "mdetail"};
    app.require_subcommand(1);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train one network (or all) and write its checkpoint");
    train_cmd->add_option("--task", train.task, "Task name or 'all'")->required();
    train_cmd->add_option("--data", train.data, "Dataset root written by gen-data (synthetic when omitted)");
    train_cmd->add_option("--config", train.config, "Training config JSON");
    train_cmd->add_option("--out", train.out, "Checkpoint directory (default $MDETAIL_MODEL_DIR or ./models)");
    train_cmd->add_option("--epochs", train.epochs, "Override the configured epoch count");
    train_cmd->add_option("--count", train.count, "Synthetic samples when --data is omitted");
    train_cmd->add_option("--resolution", train.resolution, "Synthetic sample resolution (0 = task default)");
    train_cmd->add_option("--seed", train.seed, "Seed for data and initialization");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Write synthetic matched pairs");
    gen_cmd->add_option("--task", gen.task, "Task name or 'all'")->required();
    gen_cmd->add_option("--out", gen.out, "Dataset root");
    gen_cmd->add_option("--count", gen.count, "Number of pairs");
    gen_cmd->add_option("--resolution", gen.resolution, "Resolution (0 = task default)");
    gen_cmd->add_option("--seed", gen.seed, "Seed");

    DetailArgs detail;
    auto* detail_cmd = app.add_subcommand("detail", "Detail the blocks of a scene");
    detail_cmd->add_option("--scene", detail.scene, "Scene JSON")->required();
    detail_cmd->add_option("--distribution", detail.distribution, "Style distribution JSON (prior when omitted)");
    detail_cmd->add_option("--blocks", detail.blocks, "Comma-separated block indices, or 'all'");
    detail_cmd->add_option("--out", detail.out, "Output directory");
    detail_cmd->add_option("--models", detail.models, "Checkpoint directory (default $MDETAIL_MODEL_DIR)");
    detail_cmd->add_option("--config", detail.config, "Detail settings JSON");
    detail_cmd->add_option("--seed", detail.seed, "Style sampling seed");
    detail_cmd->add_flag("--checksum", detail.checksum, "Print a digest of all outputs except timings");

    PreviewArgs preview;
    auto* preview_cmd = app.add_subcommand("preview", "Render style samples of one property");
    preview_cmd->add_option("--distribution", preview.distribution, "Style distribution JSON");
    preview_cmd->add_option("--property", preview.property, "Property name")->required();
    preview_cmd->add_option("--n", preview.n, "Number of samples")->check(CLI::Range(1, 64));
    preview_cmd->add_option("--out", preview.out, "Output directory");
    preview_cmd->add_option("--models", preview.models, "Checkpoint directory (default $MDETAIL_MODEL_DIR)");
    preview_cmd->add_option("--seed", preview.seed, "Seed");

    std::string stats_path;
    auto* stats_cmd = app.add_subcommand("stats", "Print the stats table of a detail run");
    stats_cmd->add_option("path", stats_path, "Output directory or stats.json")->required();

    ServeArgs serve;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--host", serve.host, "Bind address");
    serve_cmd->add_option("--port", serve.port, "Port");
    serve_cmd->add_option("--models", serve.models, "Checkpoint directory (default $MDETAIL_MODEL_DIR)");
    serve_cmd->add_option("--out", serve.out, "Job output root");
    serve_cmd->add_option("--workers", serve.workers, "Concurrent detail jobs")->check(CLI::PositiveNumber);
    serve_cmd->add_option("--max-resident", serve.max_resident, "Networks kept in memory (0 = all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitError;
    }

    try {
        if (*train_cmd) return run_train(*train_cmd, train);
        if (*gen_cmd) return run_gen_data(*gen_cmd, gen);
        if (*detail_cmd) return run_detail(detail);
        if (*preview_cmd) return run_preview(preview);
        if (*stats_cmd) return run_stats(stats_path);
        if (*serve_cmd) return run_serve(serve);
    } catch (const DivergenceError& e) {
        std::cerr << "error: training diverged: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

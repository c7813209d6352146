// Acceptance suite: one PASS/FAIL line per primary criterion.
//
// Usage: mdetail_acceptance --cli <mdetail binary> --data <tests/data> --work <scratch dir> [--only name]

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "CLI11.hpp"
#include "mdetail/chains/chains.hpp"
#include "mdetail/gan/conditioning.hpp"
#include "mdetail/gan/losses.hpp"
#include "mdetail/gan/model.hpp"
#include "mdetail/gan/networks.hpp"
#include "mdetail/geometry/geometry.hpp"
#include "mdetail/regularize/regularize.hpp"
#include "mdetail/service/pipeline.hpp"
#include "mdetail/style/style.hpp"
#include "mdetail/synth/synth.hpp"

namespace fs = std::filesystem;
using namespace mdetail;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Context {
    fs::path cli;
    fs::path data;
    fs::path work;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Loss gradients against central finite differences.

constexpr double kFdStep = 1e-5;
constexpr double kGradRelTol = 1e-4;
/// Denominator floor for the relative error; gradients below it are compared absolutely.
constexpr double kGradFloor = 1e-6;

Outcome gradient_check(const Context&) {
    torch::manual_seed(3);
    gan::NetConfig nc;
    nc.resolution = 8;
    nc.in_channels = 4;
    nc.content_channels = 3;
    nc.style_dim = 3;
    nc.ngf = 2;
    nc.nef = 2;
    nc.ndf = 2;
    nc.depth = 2;
    nc.encoder_depth = 2;
    nc.disc_layers = 1;
    nc.activation = gan::Activation::silu;
    nc.norm = gan::Norm::none;
    gan::GanNets nets = gan::GanNets::create(nc);
    nets.to(torch::kDouble);
    nets.train(true);

    const auto opts = torch::TensorOptions().dtype(torch::kDouble);
    gan::Batch batch;
    batch.input = torch::rand({2, 4, 8, 8}, opts) * 2 - 1;
    batch.content = batch.input.slice(1, 0, 3);
    batch.target = torch::tanh(torch::randn({2, 3, 8, 8}, opts));
    const gan::StyleNoise noise = gan::StyleNoise::draw(2, 3, torch::kDouble);
    const gan::TrainConfig config;

    std::vector<torch::Tensor> params;
    for (const auto& m : {nets.generator->parameters(), nets.encoder->parameters(), nets.discriminator->parameters()})
        params.insert(params.end(), m.begin(), m.end());

    const std::array<const char*, 6> names{"L_D", "L_GAN", "L_L1", "L_KL", "L_LR", "L_total"};
    auto losses = [&]() {
        const auto d = gan::loss_discriminator(nets, batch, noise);
        const auto g = gan::loss_generator_encoder(nets, batch, noise, config);
        return std::array<torch::Tensor, 6>{d, g.gan, g.l1, g.kl, g.lr, g.total};
    };

    std::array<std::vector<torch::Tensor>, 6> analytic;
    for (std::size_t k = 0; k < 6; ++k) {
        const auto value = losses()[k];
        auto grads = torch::autograd::grad({value}, params, {}, false, false, true);
        for (std::size_t p = 0; p < params.size(); ++p)
            if (!grads[p].defined()) grads[p] = torch::zeros_like(params[p]);
        analytic[k] = grads;
    }

    torch::NoGradGuard no_grad;
    std::array<double, 6> worst{};
    std::array<double, 6> worst_abs{};
    std::size_t checked = 0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto flat = params[p].view(-1);
        double* data = flat.data_ptr<double>();
        for (std::int64_t i = 0; i < flat.numel(); ++i) {
            const double saved = data[i];
            data[i] = saved + kFdStep;
            const auto plus = losses();
            data[i] = saved - kFdStep;
            const auto minus = losses();
            data[i] = saved;
            for (std::size_t k = 0; k < 6; ++k) {
                const double fd = (plus[k].item<double>() - minus[k].item<double>()) / (2 * kFdStep);
                const double an = analytic[k][p].view(-1)[i].item<double>();
                const double err = std::abs(fd - an);
                worst_abs[k] = std::max(worst_abs[k], err);
                worst[k] = std::max(worst[k], err / std::max({std::abs(fd), std::abs(an), kGradFloor}));
            }
            ++checked;
        }
    }
    std::string detail = fmt("%zu parameters;", checked);
    bool pass = true;
    for (std::size_t k = 0; k < 6; ++k) {
        detail += fmt(" %s %.1e", names[k], worst[k]);
        pass = pass && worst[k] < kGradRelTol;
    }
    return {pass, detail + fmt(" (max relative error, tol %.0e)", kGradRelTol)};
}

// ---------------------------------------------------------------------------
// Loss fixed points.

Outcome loss_fixed_points(const Context&) {
    const auto opts = torch::TensorOptions().dtype(torch::kDouble);
    torch::manual_seed(5);
    const auto zeros = torch::zeros({4, 8}, opts);
    const double kl = gan::kl_loss(zeros, zeros).item<double>();
    const auto z = torch::randn({4, 8}, opts);
    const double lr = gan::style_reconstruction_loss(z, z.clone()).item<double>();
    const auto b = torch::rand({2, 3, 16, 16}, opts) * 2 - 1;
    const double l1 = gan::l1_loss(b, b.clone()).item<double>();
    const auto half = torch::full({2, 1, 6, 6}, 0.5, opts);
    const double d = gan::discriminator_loss(half, half).item<double>();
    const double d_err = std::abs(d - 2 * std::log(2.0));
    const bool pass = kl == 0 && lr == 0 && l1 == 0 && d_err <= 1e-9;
    return {pass, fmt("KL %.1e, LR %.1e, L1 %.1e, |L_D - 2 ln 2| %.1e", kl, lr, l1, d_err)};
}

// ---------------------------------------------------------------------------
// Toy facade-texture training and the style-control proxy.

struct ToyRun {
    bool done = false;
    std::optional<gan::GanModel> model;
    gan::TrainHistory history;
    double seconds = 0;
    std::vector<gan::TrainPair> test;
};

ToyRun& toy_run() {
    static ToyRun run;
    if (run.done) return run;
    const gan::Task task = gan::Task::facade_textures;
    synth::DatasetSpec spec;
    spec.task = task;
    spec.resolution = 64;
    spec.count = 200;
    spec.seed = 11;
    const auto train = synth::to_train_pairs(task, synth::generate_samples(spec));
    spec.count = 50;
    spec.seed = 12;
    const auto val = synth::to_train_pairs(task, synth::generate_samples(spec));
    spec.count = 100;
    spec.seed = 13;
    run.test = synth::to_train_pairs(task, synth::generate_samples(spec));

    gan::TrainConfig cfg = gan::TrainConfig::for_task(task);
    cfg.epochs = 30;
    cfg.net.resolution = 64;
    cfg.deterministic = true;
    const auto t0 = std::chrono::steady_clock::now();
    run.model.emplace(task, cfg);
    run.history = run.model->train(train, val);
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    run.done = true;
    return run;
}

Outcome toy_training(const Context&) {
    ToyRun& run = toy_run();
    const auto& last = run.history.epochs.back();

    // Same data and seed, one epoch: the first epoch must match bit for bit.
    const gan::Task task = gan::Task::facade_textures;
    synth::DatasetSpec spec;
    spec.task = task;
    spec.resolution = 64;
    spec.count = 200;
    spec.seed = 11;
    const auto train = synth::to_train_pairs(task, synth::generate_samples(spec));
    spec.count = 50;
    spec.seed = 12;
    const auto val = synth::to_train_pairs(task, synth::generate_samples(spec));
    gan::TrainConfig cfg = gan::TrainConfig::for_task(task);
    cfg.epochs = 1;
    cfg.net.resolution = 64;
    cfg.deterministic = true;
    gan::GanModel again(task, cfg);
    const auto repeat = again.train(train, val);
    const auto& a = run.history.epochs.front();
    const auto& b = repeat.epochs.front();
    const bool same_epoch = a.d == b.d && a.gan == b.gan && a.l1 == b.l1 && a.kl == b.kl && a.lr == b.lr &&
                            a.val_l1 == b.val_l1 && a.val_kl_per_dim == b.val_kl_per_dim;
    const bool same_step = run.history.first_step && repeat.first_step && *run.history.first_step == *repeat.first_step;

    const bool pass = last.val_l1 < 0.25 && last.val_kl_per_dim < 0.5 && same_epoch && same_step &&
                      run.seconds <= 30 * 60;
    return {pass, fmt("val L1 %.4f (< 0.25), KL/dim %.4f (< 0.5), first epoch reproduced %s, first step %s, %.0f s",
                      last.val_l1, last.val_kl_per_dim, same_epoch ? "bit-exact" : "DIFFERS",
                      same_step ? "bit-exact" : "DIFFERS", run.seconds)};
}

Outcome style_proxy(const Context&) {
    ToyRun& run = toy_run();
    const gan::GanModel& m = *run.model;
    style::Rng rng(5);
    int wins = 0;
    const int n = int(run.test.size());
    for (int i = 0; i < n; ++i) {
        const Image& reference = run.test[std::size_t((i + 37) % n)].target;
        const auto z_ref = m.encode_mean(reference);
        const Image guided = m.generate(run.test[std::size_t(i)].input, z_ref);
        const Image random = m.generate(run.test[std::size_t(i)].input, style::sample_prior(rng));
        if (m.encode_mean(guided).distance(z_ref) < m.encode_mean(random).distance(z_ref)) ++wins;
    }
    return {wins >= 80, fmt("guided output chosen in %d/%d trials (>= 80)", wins, n)};
}

// ---------------------------------------------------------------------------
// Conditioning channels against brute-force distances.

Outcome conditioning_channels(const Context&) {
    synth::Rng rng(21);
    double worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int w = synth::uniform_int(rng, 1, 64), h = synth::uniform_int(rng, 1, 64);
        const double ppm = synth::uniform(rng, 0.2, 40.0);
        Image mask(w, h, 1);
        const double density = synth::uniform(rng, 0.2, 1.0);
        const int rects = synth::uniform_int(rng, 0, 3);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) mask.at(x, y) = synth::chance(rng, density) ? 1.0f : 0.0f;
        for (int r = 0; r < rects; ++r) {
            const int x0 = synth::uniform_int(rng, 0, w - 1), y0 = synth::uniform_int(rng, 0, h - 1);
            const int x1 = synth::uniform_int(rng, x0, w - 1), y1 = synth::uniform_int(rng, y0, h - 1);
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) mask.at(x, y) = 1.0f;
        }
        mask.at(synth::uniform_int(rng, 0, w - 1), synth::uniform_int(rng, 0, h - 1)) = 1.0f;

        Image content(w, h, 3, -1.0f);
        const auto in = gan::build_conditioned_input(content, mask, ppm);

        int bx0 = w, by0 = h, bx1 = -1, by1 = -1;
        std::vector<std::pair<int, int>> background;
        for (int y = -1; y <= h; ++y)
            for (int x = -1; x <= w; ++x) {
                const bool inside = x >= 0 && y >= 0 && x < w && y < h;
                if (inside && mask.at(x, y) > 0.5f) {
                    bx0 = std::min(bx0, x);
                    by0 = std::min(by0, y);
                    bx1 = std::max(bx1, x);
                    by1 = std::max(by1, y);
                } else {
                    background.emplace_back(x, y);
                }
            }
        auto norm = [](double meters) { return std::clamp(meters / 50.0, 0.0, 1.0) * 2.0 - 1.0; };
        const double scale = std::clamp(ppm / 100.0, 0.0, 1.0) * 2.0 - 1.0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double cx = x + 0.5, cy = y + 0.5;
                double boundary = 0;
                if (mask.at(x, y) > 0.5f) {
                    double best = 1e300;
                    for (const auto& [qx, qy] : background)
                        best = std::min(best, std::hypot(double(qx - x), double(qy - y)));
                    boundary = (best - 0.5) / ppm;
                }
                const std::array<double, 5> expected{
                    norm(std::max(0.0, cx - bx0) / ppm), norm(std::max(0.0, bx1 + 1 - cx) / ppm),
                    norm(std::max(0.0, cy - by0) / ppm), norm(std::max(0.0, by1 + 1 - cy) / ppm), norm(boundary)};
                for (int c = 0; c < 5; ++c) worst = std::max(worst, std::abs(in.context.at(x, y, c) - expected[std::size_t(c)]));
                worst = std::max(worst, std::abs(in.scale.at(x, y) - scale));
            }
    }
    return {worst <= 1e-6, fmt("50 masks, max deviation %.2e (tol 1e-6)", worst)};
}

// ---------------------------------------------------------------------------
// Regularizers.

/// Local maxima of the Epanechnikov density of `samples` with half-width
/// `radius` (the shadow of a flat kernel of width 2·radius), on a 0.1 mm grid.
std::vector<double> density_modes(const std::vector<double>& samples, double radius) {
    const double lo = *std::min_element(samples.begin(), samples.end()) - radius;
    const double hi = *std::max_element(samples.begin(), samples.end()) + radius;
    const double step = 1e-4;
    const int n = int(std::ceil((hi - lo) / step)) + 1;
    std::vector<double> f(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double x = lo + i * step;
        for (double s : samples) {
            const double u = (x - s) / radius;
            if (std::abs(u) < 1) f[std::size_t(i)] += 1 - u * u;
        }
    }
    std::vector<double> modes;
    for (int i = 0; i < n; ++i) {
        const double left = i > 0 ? f[std::size_t(i - 1)] : 0.0;
        const double right = i + 1 < n ? f[std::size_t(i + 1)] : 0.0;
        if (f[std::size_t(i)] > 0 && f[std::size_t(i)] >= left && f[std::size_t(i)] > right) modes.push_back(lo + i * step);
    }
    return modes;
}

double distance_to_modes(double v, const std::vector<double>& modes) {
    double best = 1e300;
    for (double m : modes) best = std::min(best, std::abs(v - m));
    return best;
}

bool same_boxes(const std::vector<regularize::DetailBox>& a, const std::vector<regularize::DetailBox>& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].label != b[i].label || a[i].source != b[i].source || a[i].pitch != b[i].pitch ||
            a[i].dormer != b[i].dormer)
            return false;
        const auto& p = a[i].rect;
        const auto& q = b[i].rect;
        if (std::abs(p.x - q.x) > tol || std::abs(p.y - q.y) > tol || std::abs(p.w - q.w) > tol ||
            std::abs(p.h - q.h) > tol || std::abs(a[i].rotation_deg - b[i].rotation_deg) > tol)
            return false;
    }
    return true;
}

Outcome regularizer_oracles(const Context&) {
    synth::Rng rng(31);
    std::vector<std::string> failures;

    // Panes: outer product of thresholded profiles, computed independently.
    int pane_mismatch = 0, degenerate = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int w = synth::uniform_int(rng, 1, 48), h = synth::uniform_int(rng, 1, 48);
        const double density = synth::uniform(rng, 0.0, 1.0);
        Image mask(w, h, 1);
        for (auto& v : mask.data()) v = synth::chance(rng, density) ? 1.0f : 0.0f;
        std::vector<bool> cols(static_cast<std::size_t>(w)), rows(static_cast<std::size_t>(h));
        for (int x = 0; x < w; ++x) {
            double s = 0;
            for (int y = 0; y < h; ++y) s += mask.at(x, y);
            cols[std::size_t(x)] = s / h >= 0.33;
        }
        for (int y = 0; y < h; ++y) {
            double s = 0;
            for (int x = 0; x < w; ++x) s += mask.at(x, y);
            rows[std::size_t(y)] = s / w >= 0.33;
        }
        const Image out = regularize::regularize_window_panes(mask);
        bool ok = out.width() == w && out.height() == h && out.channels() == 1;
        for (int y = 0; ok && y < h; ++y)
            for (int x = 0; ok && x < w; ++x) ok = out.at(x, y) == ((cols[std::size_t(x)] && rows[std::size_t(y)]) ? 1.0f : 0.0f);
        if (!ok) ++pane_mismatch;
        if (regularize::regularize_window_panes(out) != out) ++degenerate;
    }
    if (pane_mismatch) failures.push_back(fmt("panes: %d/1000 differ from the oracle", pane_mismatch));

    // Pane idempotence on window-chain masks: rendered pane grids cropped to
    // the window, as the window chain does, with 5% flips.
    int pane_not_idempotent = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto layout = synth::random_window(rng, {});
        const auto rasters = synth::render_window(layout, 32, rng, 0.0);
        const auto& labels = rasters.pane_labels;
        int x1 = -1, y0 = labels.height;
        for (int y = 0; y < labels.height; ++y)
            for (int x = 0; x < labels.width; ++x)
                if (labels.at(x, y) != Label::background) {
                    x1 = std::max(x1, x);
                    y0 = std::min(y0, y);
                }
        Image mask = label_mask(labels, Label::pane).crop(0, y0, x1 + 1, labels.height - y0);
        for (auto& v : mask.data())
            if (synth::chance(rng, 0.05)) v = 1.0f - v;
        const Image once = regularize::regularize_window_panes(mask);
        if (regularize::regularize_window_panes(once) != once) ++pane_not_idempotent;
    }
    if (pane_not_idempotent) failures.push_back(fmt("panes: %d/200 not idempotent", pane_not_idempotent));

    // Mean-shift snapping on jittered window grids.
    double worst_mode = 0;
    int window_not_idempotent = 0;
    const double radius = regularize::MeanShiftConfig{}.kernel_width / 2;
    for (int trial = 0; trial < 200; ++trial) {
        const int nrows = synth::uniform_int(rng, 2, 4), ncols = synth::uniform_int(rng, 2, 5);
        const double W = synth::uniform(rng, 0.8, 1.6), gap_x = synth::uniform(rng, 0.8, 2.0);
        const double gap_y = synth::uniform(rng, 1.0, 2.0);
        std::vector<double> row_h(std::size_t(nrows), synth::uniform(rng, 1.0, 1.8));
        if (synth::chance(rng, 0.5)) row_h[0] += 1.0;  // a taller ground floor: a second height mode
        std::vector<regularize::DetailBox> boxes;
        std::vector<std::vector<std::size_t>> rows(static_cast<std::size_t>(nrows)), cols(static_cast<std::size_t>(ncols));
        double y = 1.0;
        for (int r = 0; r < nrows; ++r) {
            for (int c = 0; c < ncols; ++c) {
                const double cx = 1.0 + W / 2 + c * (W + gap_x);
                const double cy = y + row_h[std::size_t(r)] / 2;
                const double w = W + synth::uniform(rng, -0.1, 0.1);
                const double h = row_h[std::size_t(r)] + synth::uniform(rng, -0.1, 0.1);
                regularize::DetailBox b;
                b.rect = {cx - w / 2, cy - h / 2, w, h};
                rows[std::size_t(r)].push_back(boxes.size());
                cols[std::size_t(c)].push_back(boxes.size());
                boxes.push_back(b);
            }
            y += row_h[std::size_t(r)] + gap_y;
        }
        const Vec2 bounds(2.0 + ncols * (W + gap_x), y + 1.0);
        const auto out = regularize::regularize_window_boxes(boxes, bounds);

        std::vector<double> widths, heights, gaps_x, gaps_y;
        for (const auto& b : boxes) {
            widths.push_back(b.rect.w);
            heights.push_back(b.rect.h);
        }
        for (const auto& row : rows)
            for (std::size_t k = 0; k + 1 < row.size(); ++k)
                gaps_x.push_back(boxes[row[k + 1]].rect.x - boxes[row[k]].rect.right());
        for (const auto& col : cols)
            for (std::size_t k = 0; k + 1 < col.size(); ++k)
                gaps_y.push_back(boxes[col[k + 1]].rect.y - boxes[col[k]].rect.top());
        const auto mw = density_modes(widths, radius), mh = density_modes(heights, radius);
        const auto mgx = density_modes(gaps_x, radius), mgy = density_modes(gaps_y, radius);
        for (const auto& b : out) {
            worst_mode = std::max(worst_mode, distance_to_modes(b.rect.w, mw));
            worst_mode = std::max(worst_mode, distance_to_modes(b.rect.h, mh));
        }
        for (const auto& row : rows)
            for (std::size_t k = 0; k + 1 < row.size(); ++k)
                worst_mode = std::max(worst_mode, distance_to_modes(out[row[k + 1]].rect.x - out[row[k]].rect.right(), mgx));
        for (const auto& col : cols)
            for (std::size_t k = 0; k + 1 < col.size(); ++k)
                worst_mode = std::max(worst_mode, distance_to_modes(out[col[k + 1]].rect.y - out[col[k]].rect.top(), mgy));
        if (!same_boxes(regularize::regularize_window_boxes(out, bounds), out, 1e-6)) ++window_not_idempotent;
    }
    if (worst_mode > 0.04) failures.push_back(fmt("mean-shift: %.3f m from the density mode", worst_mode));
    if (window_not_idempotent) failures.push_back(fmt("windows: %d/200 not idempotent", window_not_idempotent));

    // Facade details and roof features on synthetic layouts.
    int detail_not_idempotent = 0, roof_not_idempotent = 0, detail_sets = 0, roof_sets = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto facade = synth::random_facade(rng, {});
        const auto fr = synth::render_facade(facade, 128, rng, 0.0);
        const auto windows = regularize::regularize_facade_windows(fr.window_labels, fr.pixels_per_meter);
        const auto details = regularize::regularize_facade_details(fr.full_labels, fr.pixels_per_meter, windows);
        const Vec2 bounds(fr.window_labels.width / fr.pixels_per_meter, fr.window_labels.height / fr.pixels_per_meter);
        if (!details.empty()) ++detail_sets;
        if (!same_boxes(regularize::regularize_detail_boxes(details, windows, bounds), details, 1e-9))
            ++detail_not_idempotent;

        const auto roof = synth::random_roof(rng, {});
        const auto rr = synth::render_roof(roof, 128, rng, 0.0);
        const auto features = regularize::regularize_roof_labels(rr.details, rr.pixels_per_meter, roof.pitches);
        if (!features.empty()) ++roof_sets;
        if (!same_boxes(regularize::regularize_roof_boxes(features, roof.pitches), features, 1e-9))
            ++roof_not_idempotent;
    }
    if (detail_not_idempotent) failures.push_back(fmt("details: %d/100 not idempotent", detail_not_idempotent));
    if (roof_not_idempotent) failures.push_back(fmt("roof: %d/100 not idempotent", roof_not_idempotent));

    std::string detail = fmt("panes 1000/1000 exact, mean-shift max %.1e m (tol 0.04) on 200 grids, "
                             "idempotent on windows/details(%d)/roofs(%d)/panes; %d sparse random pane outputs "
                             "fall below the threshold on a second pass",
                             worst_mode, detail_sets, roof_sets, degenerate);
    if (!failures.empty()) {
        detail.clear();
        for (const auto& f : failures) detail += (detail.empty() ? "" : "; ") + f;
    }
    return {failures.empty(), detail};
}

// ---------------------------------------------------------------------------
// Super-resolution assembly with an identity network.

class IdentityNetwork : public chains::Network {
public:
    explicit IdentityNetwork(int resolution) : resolution_(resolution) {}
    int resolution() const override { return resolution_; }
    Image translate(const Image& input, const style::StyleVector&) const override { return input; }

private:
    int resolution_;
};

Outcome superres_identity(const Context&) {
    synth::Rng rng(41);
    const IdentityNetwork net(32);
    int exact = 0;
    double worst = 0;
    std::string sizes;
    for (int trial = 0; trial < 20; ++trial) {
        const int w = synth::uniform_int(rng, 8, 90), h = synth::uniform_int(rng, 8, 90);
        Image tex(w, h, 3);
        for (auto& v : tex.data()) v = float(synth::uniform(rng, -1, 1));
        const int overlap = synth::uniform_int(rng, 2, 16);
        const Image out = chains::run_super_resolution(tex, {}, net, overlap);
        const Image ref = resize_bilinear(tex, 2 * w, 2 * h);
        double d = 0;
        for (std::size_t i = 0; i < ref.size(); ++i) d = std::max(d, double(std::abs(out.data()[i] - ref.data()[i])));
        worst = std::max(worst, d);
        if (out == ref) ++exact;
    }
    return {exact == 20, fmt("%d/20 sizes reproduce the bilinear upsample exactly (max deviation %.1e)", exact, worst)};
}

// ---------------------------------------------------------------------------
// Geometry synthesis and normal maps.

Outcome geometry_properties(const Context&) {
    const auto weights = geometry::roughness_weights();
    int count_mismatch = 0, uv_bad = 0;
    double worst_norm = 0, worst_flat = 0;
    std::size_t flat_pixels = 0, boxes_total = 0;
    for (int trial = 0; trial < 50; ++trial) {
        synth::Rng rng = synth::sample_rng(51, std::uint64_t(trial));
        const auto layout = synth::random_facade(rng, {});
        const auto fr = synth::render_facade(layout, 128, rng, 0.03);
        const auto windows = regularize::regularize_facade_windows(fr.window_labels, fr.pixels_per_meter);
        const auto details = regularize::regularize_facade_details(fr.full_labels, fr.pixels_per_meter, windows);
        std::vector<regularize::DetailBox> boxes = windows;
        boxes.insert(boxes.end(), details.begin(), details.end());
        boxes_total += boxes.size();

        scene::FacadeFrame frame;
        frame.width = fr.window_labels.width / fr.pixels_per_meter;
        frame.height = fr.window_labels.height / fr.pixels_per_meter;
        frame.pixels_per_meter = fr.pixels_per_meter;
        const auto mesh = geometry::synthesize_facade_geometry(boxes, frame, layout.outline);
        if (mesh.parts.size() != boxes.size() + 1) ++count_mismatch;
        for (const auto& part : mesh.parts)
            for (const auto& uv : part.uvs)
                if (!(uv.x() >= 0 && uv.x() <= 1 && uv.y() >= 0 && uv.y() <= 1)) ++uv_bad;

        const double amplitude = synth::uniform(rng, 0.03, 3.0);
        const Image normals = geometry::generate_normal_map(fr.texture, fr.full_labels, weights, amplitude);
        for (int y = 0; y < normals.height(); ++y)
            for (int x = 0; x < normals.width(); ++x) {
                const double nx = normals.at(x, y, 0), ny = normals.at(x, y, 1), nz = normals.at(x, y, 2);
                worst_norm = std::max(worst_norm, std::abs(std::sqrt(nx * nx + ny * ny + nz * nz) - 1));
                if (weights[std::size_t(fr.full_labels.at(x, y))] == 0) {
                    ++flat_pixels;
                    worst_flat = std::max({worst_flat, std::abs(nx), std::abs(ny), std::abs(nz - 1)});
                }
            }
    }
    const bool pass = count_mismatch == 0 && uv_bad == 0 && worst_norm <= 1e-3 && worst_flat <= 1e-6 && flat_pixels > 0;
    return {pass, fmt("50 label sets (%zu boxes): sub-mesh count mismatches %d, UVs outside [0,1] %d, "
                      "max | |n| - 1 | %.1e, max deviation from (0,0,1) on %zu zero-weight pixels %.1e",
                      boxes_total, count_mismatch, uv_bad, worst_norm, flat_pixels, worst_flat)};
}

// ---------------------------------------------------------------------------
// End-to-end CLI determinism and the stats table.

struct Command {
    int status = -1;
    std::string output;
};

Command run(const std::string& command) {
    Command out;
    FILE* pipe = popen((command + " 2>&1").c_str(), "r");
    if (!pipe) return out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.output.append(buf, n);
    const int status = pclose(pipe);
    out.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

std::string checksum_of(const std::string& output) {
    std::istringstream in(output);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("checksum ", 0) == 0) return line.substr(9);
    return {};
}

Outcome cli_determinism(const Context& ctx) {
    if (ctx.cli.empty()) return {false, "no --cli binary given"};
    const fs::path dir = ctx.work / "e2e";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path models = dir / "models";
    const auto train = run(quote(ctx.cli) + " train --task all --epochs 1 --count 10 --resolution 32 --out " +
                           quote(models));
    if (train.status != 0) return {false, "train failed: " + train.output.substr(0, 400)};

    auto detail = [&](const std::string& name, int seed) {
        return run(quote(ctx.cli) + " detail --scene " + quote(ctx.data / "toy_scene.json") + " --distribution " +
                   quote(ctx.data / "two_mode_distribution.json") + " --models " + quote(models) + " --out " +
                   quote(dir / name) + " --seed " + std::to_string(seed) + " --checksum");
    };
    const auto first = detail("run1", 7);
    const auto second = detail("run2", 7);
    if (first.status != 0 || second.status != 0)
        return {false, "detail failed: " + (first.status != 0 ? first.output : second.output).substr(0, 400)};
    const std::string c1 = checksum_of(first.output), c2 = checksum_of(second.output);

    // Totals row against column sums of the printed table.
    const auto stats = run(quote(ctx.cli) + " stats " + quote(dir / "run1"));
    std::istringstream in(stats.output);
    std::string line;
    std::array<double, 4> sums{}, totals{};
    int rows = 0;
    bool have_total = false;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string name;
        std::array<double, 4> v{};
        if (!(ls >> name >> v[0] >> v[1] >> v[2] >> v[3])) continue;
        if (name == "total") {
            totals = v;
            have_total = true;
        } else {
            for (int k = 0; k < 4; ++k) sums[std::size_t(k)] += v[std::size_t(k)];
            ++rows;
        }
    }
    // Times are printed rounded to 0.01 s, so each row adds up to half a unit.
    const bool totals_ok = have_total && rows > 0 && totals[0] == sums[0] && totals[1] == sums[1] &&
                           totals[2] == sums[2] && std::abs(totals[3] - sums[3]) <= 0.005 * (rows + 1);
    const auto table = service::StatsTable::from_json(read_text(dir / "run1" / "stats.json"));
    const auto t = table.totals();
    int r = 0, f = 0, w = 0;
    for (const auto& row : table.rows) {
        r += row.roofs;
        f += row.facades;
        w += row.windows;
    }
    const bool json_ok = t.roofs == r && t.facades == f && t.windows == w;

    // Window count against the window sub-meshes of the exported models.
    int window_meshes = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir / "run1")) {
        if (entry.path().filename() != "model.obj") continue;
        std::istringstream obj(read_text(entry.path()));
        // objects are named <part>_<index>_<label>; roof windows carry the roof_window label
        while (std::getline(obj, line)) {
            if (line.rfind("o ", 0) != 0) continue;
            const auto first = line.find('_');
            const auto second = first == std::string::npos ? first : line.find('_', first + 1);
            if (second != std::string::npos && line.substr(second + 1) == "window") ++window_meshes;
        }
    }
    const bool windows_ok = window_meshes == t.windows;

    const bool pass = !c1.empty() && c1 == c2 && totals_ok && json_ok && windows_ok;
    return {pass, fmt("checksums %s / %s (%s); %d block rows, totals %s (roofs %.0f, facades %.0f, windows %.0f); "
                      "%d window sub-meshes",
                      c1.c_str(), c2.c_str(), c1 == c2 ? "identical" : "DIFFER", rows,
                      totals_ok && json_ok ? "equal column sums" : "DO NOT equal column sums", totals[0], totals[1],
                      totals[2], window_meshes)};
}

// ---------------------------------------------------------------------------
// Style sampling statistics.

Outcome sampling_statistics(const Context& ctx) {
    const auto dist = style::parse_distribution(read_text(ctx.data / "two_mode_distribution.json"));
    const auto& facade = dist.sets.at(0)[style::Property::facade_texture];
    if (!facade) return {false, "distribution has no facade-texture entry"};
    style::Rng rng(61);
    const int draws = 10000;
    int positive = 0;
    for (int i = 0; i < draws; ++i)
        if (style::sample_style(*facade, rng)[0] > 0) ++positive;
    const double bound = 3 * std::sqrt(draws * 0.25);
    const bool mix_ok = std::abs(positive - draws / 2) <= bound;

    // Roof texture is absent from the distribution, so it falls back to the prior.
    double sum = 0, sum_sq = 0;
    std::size_t n = 0;
    for (int i = 0; i < draws; ++i) {
        const auto s = style::sample_building_styles(dist.sets, rng);
        for (double v : s[style::Property::roof_texture].values()) {
            sum += v;
            sum_sq += v * v;
            ++n;
        }
    }
    const double mean = sum / double(n);
    const double var = sum_sq / double(n) - mean * mean;
    const bool prior_ok = std::abs(mean) <= 0.05 && std::abs(var - 1) <= 0.05;
    return {mix_ok && prior_ok, fmt("mode 1 drawn %d/%d (3 sigma bound +-%.0f); prior mean %.4f, variance %.4f "
                                    "(within 0.05 of 0 and 1)",
                                    positive, draws, bound, mean, var)};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    Context ctx;
    std::string only;
    app.add_option("--cli", ctx.cli, "mdetail binary");
    app.add_option("--data", ctx.data, "Test data directory")->required();
    app.add_option("--work", ctx.work, "Scratch directory")->required();
    app.add_option("--only", only, "Run a single criterion");
    CLI11_PARSE(app, argc, argv);
    fs::create_directories(ctx.work);
    torch::set_num_threads(1);

    const std::vector<std::pair<std::string, std::function<Outcome(const Context&)>>> criteria{
        {"loss-gradients", gradient_check},
        {"loss-fixed-points", loss_fixed_points},
        {"toy-training", toy_training},
        {"style-control-proxy", style_proxy},
        {"conditioning-channels", conditioning_channels},
        {"regularizer-oracles", regularizer_oracles},
        {"superres-assembly", superres_identity},
        {"geometry", geometry_properties},
        {"end-to-end-determinism", cli_determinism},
        {"sampling-statistics", sampling_statistics},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        if (!only.empty() && only != name) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check(ctx);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), s);
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}

#include <cmath>
#include <fstream>

#include "doctest.h"
#include "mdetail/gan/conditioning.hpp"
#include "mdetail/regularize/regularize.hpp"
#include "mdetail/synth/synth.hpp"
#include "stubs.hpp"

#include "json.hpp"

using namespace mdetail;
using namespace mdetail::synth;

namespace {

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double t = d.squaredNorm() > 0 ? std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0) : 0.0;
    return (p - (a + t * d)).norm();
}

} // namespace

TEST_SUITE("synth") {

TEST_CASE("samples are deterministic in the seed") {
    for (const auto& info : gan::all_tasks()) {
        DatasetSpec spec;
        spec.task = info.task;
        spec.count = 3;
        spec.resolution = 32;
        spec.seed = 7;
        const auto a = generate_samples(spec);
        const auto b = generate_samples(spec);
        REQUIRE(a.size() == 3);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].a == b[i].a);
            CHECK(a[i].b == b[i].b);
            CHECK(a[i].extra == b[i].extra);
            CHECK(a[i].pixels_per_meter == b[i].pixels_per_meter);
        }
        CHECK(generate_sample(spec, 2).b == a[2].b);
        spec.seed = 8;
        CHECK_FALSE(generate_samples(spec)[0].b == a[0].b);
    }
}

TEST_CASE("uniform draws are in range") {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = uniform(rng, -2, 3);
        CHECK(u >= -2);
        CHECK(u < 3);
        const int k = uniform_int(rng, 1, 4);
        CHECK(k >= 1);
        CHECK(k <= 4);
    }
    CHECK(sample_rng(3, 5)() == sample_rng(3, 5)());
    CHECK(sample_rng(3, 5)() != sample_rng(3, 6)());
}

TEST_CASE("facade windows are aligned in rows and columns") {
    const Knobs knobs;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng = sample_rng(seed, 0);
        const auto layout = random_facade(rng, knobs);
        CHECK(layout.floor_height >= knobs.floor_height_min);
        CHECK(layout.floor_height <= knobs.floor_height_max);
        for (const auto& a : layout.openings)
            for (const auto& b : layout.openings)
                if (a.label == Label::window && b.label == Label::window && std::abs(a.rect.y - b.rect.y) < 0.5)
                    CHECK(a.rect.h == b.rect.h);
        // occluders clip windows, so only unoccluded facades are checked in raster space
        if (!layout.occluders.empty()) continue;
        const auto r = render_facade(layout, 128, rng, knobs.noise);
        const auto comps = regularize::connected_components(r.window_labels, Label::window);
        for (std::size_t i = 0; i < comps.size(); ++i)
            for (std::size_t j = i + 1; j < comps.size(); ++j) {
                const auto& a = comps[i];
                const auto& b = comps[j];
                const bool same_row = a.min_row <= b.max_row && b.min_row <= a.max_row;
                if (same_row) {
                    CHECK(std::abs(a.min_row - b.min_row) <= 1);
                    CHECK(std::abs(a.max_row - b.max_row) <= 1);
                }
            }
    }
}

TEST_CASE("the scale channel is pixels per meter over one hundred") {
    CHECK(gan::scale_value(12.8) == doctest::Approx(0.128));
    DatasetSpec spec;
    spec.task = gan::Task::facade_window_labels;
    spec.count = 2;
    spec.resolution = 32;
    const auto samples = generate_samples(spec);
    for (const auto& s : samples) {
        const auto pair = to_train_pair(spec.task, s);
        const int scale_channel = gan::task_info(spec.task).content_channels;
        CHECK(pair.input.at(5, 5, scale_channel) == gan::normalize_scale(s.pixels_per_meter));
    }
}

TEST_CASE("flat roofs have no roof windows and chimneys hug the ridge") {
    const Knobs knobs;
    int gabled = 0, with_chimney = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng = sample_rng(seed, 1);
        const auto roof = random_roof(rng, knobs);
        if (roof.kind == RoofKind::flat) {
            for (const auto& f : roof.features) CHECK(f.label != Label::roof_window);
            Rng rr = sample_rng(seed, 2);
            CHECK(render_roof(roof, 64, rr, 0).details.count(Label::roof_window) == 0);
            continue;
        }
        if (roof.kind != RoofKind::gable) continue;
        ++gabled;
        bool any = false;
        for (const auto& f : roof.features) {
            if (f.label != Label::chimney) continue;
            any = true;
            double best = 1e9;
            for (const auto& [a, b] : roof.ridges) best = std::min(best, segment_distance(f.rect.center(), a, b));
            CHECK(best <= 1.0 + 1e-9);
        }
        with_chimney += any;
    }
    REQUIRE(gabled > 20);
    CHECK(with_chimney * 10 >= gabled * 8);
}

TEST_CASE("window pane masks are separable") {
    const Knobs knobs;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng = sample_rng(seed, 3);
        const auto w = random_window(rng, knobs);
        const auto r = render_window(w, 64, rng, knobs.noise);
        const Image panes = label_mask(r.pane_labels, Label::pane);
        const int n = panes.width();
        std::vector<char> any_col(std::size_t(n), 0), any_row(std::size_t(n), 0);
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                if (panes.at(x, y) != 0.0f) any_col[std::size_t(x)] = any_row[std::size_t(y)] = 1;
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                CHECK((panes.at(x, y) != 0.0f) == (any_col[std::size_t(x)] && any_row[std::size_t(y)]));
    }
}

TEST_CASE("pane counts are uniform over the configured range") {
    const Knobs knobs;
    Rng rng(99);
    std::vector<int> cols(5, 0), rows(6, 0);
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto w = random_window(rng, knobs);
        REQUIRE(w.pane_columns.size() >= 1);
        REQUIRE(w.pane_columns.size() <= 4);
        REQUIRE(w.pane_rows.size() >= 1);
        REQUIRE(w.pane_rows.size() <= 5);
        ++cols[w.pane_columns.size()];
        ++rows[w.pane_rows.size()];
    }
    auto within = [&](int count, double p) { return std::abs(count - n * p) <= 3 * std::sqrt(n * p * (1 - p)); };
    for (int k = 1; k <= 4; ++k) CHECK(within(cols[std::size_t(k)], 0.25));
    for (int k = 1; k <= 5; ++k) CHECK(within(rows[std::size_t(k)], 0.2));
}

TEST_CASE("degradation without blur or paste is the identity") {
    Rng rng(4);
    const Image target = material_patch(false, 32, rng);
    DegradeOptions opts;
    opts.sigma = 0.0;
    opts.second_texture = false;
    const auto d = degrade_for_superres(target, material_patch(true, 32, rng), rng, opts);
    CHECK(d.input == target);
    CHECK(d.target == target);
    CHECK_FALSE(d.pasted.has_value());
}

TEST_CASE("the pasted texture covers 10 to 30 percent") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const Image target = material_patch(false, 48, rng);
        const Image second = material_patch(true, 48, rng);
        const auto d = degrade_for_superres(target, second, rng);
        CHECK(d.target == target);
        CHECK(d.sigma >= 1.0);
        CHECK(d.sigma <= 4.0);
        REQUIRE(d.pasted.has_value());
        const double frac = d.pasted->area() / (48.0 * 48.0);
        CHECK(frac >= 0.1 - 1e-9);
        CHECK(frac <= 0.3 + 1e-9);
    }
}

TEST_CASE("label images are palette exact") {
    for (auto task : {gan::Task::facade_window_labels, gan::Task::facade_full_labels, gan::Task::window_labels,
                      gan::Task::roof_labels}) {
        DatasetSpec spec;
        spec.task = task;
        spec.count = 4;
        spec.resolution = 32;
        for (const auto& s : generate_samples(spec)) {
            CHECK_NOTHROW(decode_labels(s.b));
            if (task == gan::Task::window_labels || task == gan::Task::roof_labels) CHECK_NOTHROW(decode_labels(s.a));
        }
    }
}

TEST_CASE("datasets round trip through disk") {
    const auto root = test::scratch_dir("synth-dataset");
    DatasetSpec spec;
    spec.task = gan::Task::window_labels;
    spec.count = 5;
    spec.resolution = 32;
    spec.seed = 3;
    const auto dir = write_dataset(root, spec);
    CHECK(dir == root / "window-labels");
    const auto ds = load_dataset(dir);
    CHECK(ds.task == spec.task);
    REQUIRE(ds.samples.size() == 5);
    const auto orig = generate_samples(spec);
    for (std::size_t i = 0; i < orig.size(); ++i) {
        CHECK(decode_labels(ds.samples[i].b) == decode_labels(orig[i].b));
        CHECK(ds.samples[i].pixels_per_meter == doctest::Approx(orig[i].pixels_per_meter));
    }
    std::ifstream in(dir / "manifest.json");
    const auto manifest = nlohmann::json::parse(in);
    CHECK(manifest["samples"][0]["scale"].get<double>() ==
          doctest::Approx(gan::scale_value(orig[0].pixels_per_meter)));
    CHECK_THROWS_AS(load_dataset(root / "missing"), Error);
}

} // TEST_SUITE

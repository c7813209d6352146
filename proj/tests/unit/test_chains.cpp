#include <mutex>
#include <set>

#include "doctest.h"
#include "mdetail/chains/chains.hpp"
#include "mdetail/gan/model.hpp"
#include "stubs.hpp"

using namespace mdetail;
using namespace mdetail::chains;

namespace {

scene::Facade rect_facade(double width, double height) {
    scene::Facade f;
    f.polygon = {{0, 0, 0}, {width, 0, 0}, {width, 0, height}, {0, 0, height}};
    f.normal = {0, -1, 0};
    return f;
}

style::BuildingStyle fixed_style(double v) {
    style::BuildingStyle s;
    for (auto& z : s.vectors) z = style::StyleVector(std::vector<double>(style::kStyleDim, v));
    s.set_index = 0;
    return s;
}

/// Forwards to a stub and records every style vector it is given.
class RecordingNetwork : public Network {
public:
    RecordingNetwork(gan::Task task, int res) : inner_(task, res) {}
    int resolution() const override { return inner_.resolution(); }
    const style::StyleEncoder* encoder() const override { return inner_.encoder(); }
    Image translate(const Image& input, const style::StyleVector& z) const override {
        std::lock_guard lock(mutex_);
        seen.push_back(z);
        return inner_.translate(input, z);
    }
    mutable std::vector<style::StyleVector> seen;

private:
    test::StubNetwork inner_;
    mutable std::mutex mutex_;
};

} // namespace

TEST_SUITE("chains") {

TEST_CASE("a blank facade populates every stage") {
    auto nets = test::stub_networks();
    const auto r = run_facade_chain(rect_facade(10, 20), {}, fixed_style(0.2), *nets);
    CHECK_FALSE(r.empty);
    const int w = r.frame.cols(), h = r.frame.rows();
    CHECK(std::max(w, h) == 32);
    CHECK(r.mask.width() == w);
    CHECK(r.window_labels.width == w);
    CHECK(r.window_labels.height == h);
    CHECK(r.labels.width == w);
    CHECK(r.coarse.width() == w);
    CHECK(r.hires.width() == 2 * w);
    CHECK(r.hires.height() == 2 * h);
    CHECK(r.window_labels.count(Label::window) > 0);
    CHECK(r.labels.count(Label::sill) > 0);
    CHECK_FALSE(r.windows.empty());
    CHECK_FALSE(r.timings.empty());
    for (const auto& b : r.windows) {
        CHECK(b.rect.x >= -1e-9);
        CHECK(b.rect.right() <= r.frame.width + 1e-9);
    }
    for (Label l : r.window_labels.labels)
        CHECK(std::find(label_sets::kFacadeWindows.begin(), label_sets::kFacadeWindows.end(), l) !=
              label_sets::kFacadeWindows.end());
    for (Label l : r.labels.labels)
        CHECK(std::find(label_sets::kFacadeFull.begin(), label_sets::kFacadeFull.end(), l) !=
              label_sets::kFacadeFull.end());
}

TEST_CASE("facade chain is deterministic") {
    auto nets = test::stub_networks();
    const auto a = run_facade_chain(rect_facade(8, 12), {}, fixed_style(0.1), *nets);
    const auto b = run_facade_chain(rect_facade(8, 12), {}, fixed_style(0.1), *nets);
    CHECK(a.labels == b.labels);
    CHECK(a.window_labels == b.window_labels);
    CHECK(a.coarse == b.coarse);
    CHECK(a.hires == b.hires);
    CHECK(a.windows == b.windows);
}

TEST_CASE("a fully occluded facade short-circuits") {
    auto f = rect_facade(6, 6);
    f.occluders = {{{-1, -1}, {7, -1}, {7, 7}, {-1, 7}}};
    auto nets = test::stub_networks();
    const auto r = run_facade_chain(f, {}, fixed_style(0), *nets);
    CHECK(r.empty);
    CHECK(r.windows.empty());
    CHECK(r.labels.count(Label::background) == r.labels.labels.size());
}

TEST_CASE("every window gets one window result with a shared style") {
    auto nets = test::stub_networks();
    auto pane = std::make_shared<RecordingNetwork>(gan::Task::window_labels, 32);
    auto tex = std::make_shared<RecordingNetwork>(gan::Task::window_textures, 32);
    nets->set(gan::Task::window_labels, pane);
    nets->set(gan::Task::window_textures, tex);
    const auto style = fixed_style(0.3);
    auto r = run_facade_chain(rect_facade(10, 20), {}, style, *nets);
    run_window_chains(r, style, *nets);
    int windows = 0;
    for (const auto& b : r.windows) windows += b.label == Label::window;
    REQUIRE(windows >= 2);
    CHECK(int(r.window_results.size()) == windows);
    std::set<int> indices;
    for (const auto& wr : r.window_results) {
        indices.insert(wr.index);
        CHECK(r.windows[std::size_t(wr.index)] == wr.box);
        CHECK(wr.panes.count(Label::pane) > 0);
        CHECK(wr.texture.channels() == 3);
    }
    CHECK(int(indices.size()) == windows);
    REQUIRE(pane->seen.size() >= 2);
    for (const auto& z : pane->seen) CHECK(z == style[style::Property::window_pane_layout]);
    for (const auto& z : tex->seen) CHECK(z == style[style::Property::window_texture]);
}

TEST_CASE("tiny windows are skipped with a warning") {
    auto nets = test::stub_networks();
    regularize::DetailBox b;
    b.rect = {1, 1, 0.05, 0.05};
    CHECK_FALSE(run_window_chain(b, 10.0, fixed_style(0), *nets).has_value());
    FacadeChainResult r;
    r.frame.pixels_per_meter = 10;
    r.windows = {b};
    run_window_chains(r, fixed_style(0), *nets);
    CHECK(r.window_results.empty());
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("skipped") != std::string::npos);
}

TEST_CASE("windows inside the roof projection are dormers") {
    auto nets = test::stub_networks();
    const std::vector<Polygon2> gable{{{0, 6}, {10, 6}, {5, 12}}};
    const auto r = run_facade_chain(rect_facade(10, 6), gable, fixed_style(0), *nets);
    int dormers = 0;
    for (const auto& b : r.windows) {
        const bool inside = point_in_polygon(b.rect.center(), gable[0]);
        CHECK(b.dormer == inside);
        dormers += b.dormer;
    }
    CHECK(dormers > 0);
    CHECK(r.frame.height == doctest::Approx(12));
}

TEST_CASE("roof projection onto facades") {
    const auto cube = scene::load_scene(test::data_dir() / "unit_cube.json");
    for (std::size_t i = 0; i < cube.buildings[0].facades.size(); ++i)
        CHECK(project_roof_onto_facade(cube.buildings[0], i).empty());
    const auto gabled = scene::load_scene(test::data_dir() / "gabled_house.json");
    int gable_ends = 0;
    for (std::size_t i = 0; i < gabled.buildings[0].facades.size(); ++i) {
        const auto proj = project_roof_onto_facade(gabled.buildings[0], i);
        const auto frame = scene::facade_frame(gabled.buildings[0].facades[i], 64);
        for (const auto& poly : proj) {
            const Rect r = bounding_rect(poly);
            // Roof regions sit on top of the facade.
            if (r.h > 1e-6) {
                ++gable_ends;
                CHECK(r.top() > frame.height - 1e-6);
            }
        }
    }
    CHECK(gable_ends >= 1);
}

TEST_CASE("flat roofs use the flat palette color and get no roof windows") {
    const auto cube = scene::load_scene(test::data_dir() / "unit_cube.json");
    const auto& roof = cube.buildings[0].roof;
    const auto frame = scene::roof_frame(roof, 32);
    const auto coarse = coarse_roof_labels(roof, frame);
    CHECK(coarse.count(Label::flat_roof) > 0);
    CHECK(coarse.count(Label::roof) == 0);
    auto nets = test::stub_networks();
    const auto r = run_roof_chain(roof, {}, fixed_style(0), *nets);
    CHECK(r.labels.count(Label::roof_window) == 0);
    for (const auto& f : r.features) CHECK(f.label != Label::roof_window);
    CHECK(r.hires.width() == 2 * r.coarse.width());
}

TEST_CASE("a gabled roof draws its ridge") {
    const auto s = scene::load_scene(test::data_dir() / "gabled_house.json");
    const auto& roof = s.buildings[0].roof;
    const auto frame = scene::roof_frame(roof, 64);
    const auto coarse = coarse_roof_labels(roof, frame);
    CHECK(coarse.count(Label::ridge) > 0);
    CHECK(coarse.count(Label::roof) > 0);
    const auto layout = roof_layout(roof, frame);
    CHECK(layout.pitches.size() == 2);
    auto nets = test::stub_networks();
    const auto a = run_roof_chain(roof, {}, fixed_style(0.2), *nets);
    const auto b = run_roof_chain(roof, {}, fixed_style(0.2), *nets);
    CHECK(a.labels == b.labels);
    CHECK(a.hires == b.hires);
}

TEST_CASE("label quantization respects mask and allowed set") {
    Image out(4, 1, 3);
    const Rgb win = label_color(Label::window), roof = label_color(Label::roof);
    for (int c = 0; c < 3; ++c) {
        out.at(0, 0, c) = win[std::size_t(c)];
        out.at(1, 0, c) = win[std::size_t(c)];
        out.at(2, 0, c) = roof[std::size_t(c)];
        out.at(3, 0, c) = label_color(Label::background)[std::size_t(c)];
    }
    Image mask(4, 1, 1, 1.0f);
    mask.at(0, 0) = 0;
    const auto g = quantize_masked(out, label_sets::kFacadeWindows, mask, Label::wall);
    CHECK(g.at(0, 0) == Label::background);
    CHECK(g.at(1, 0) == Label::window);
    CHECK(g.at(2, 0) != Label::roof);
    CHECK(g.at(3, 0) == Label::wall);
}

TEST_CASE("augmentation blends only labelled pixels") {
    Image tex(2, 1, 3, 0.0f);
    LabelGrid g(2, 1, Label::wall);
    g.at(1, 0) = Label::sill;
    const auto out = augment_labels(tex, g, Label::sill, {1, 1, 1}, 0.35);
    CHECK(out.at(0, 0, 0) == 0.0f);
    CHECK(out.at(1, 0, 0) == doctest::Approx(0.35));
}

TEST_CASE("missing checkpoints are reported by task") {
    const auto dir = test::scratch_dir("chains-missing");
    CheckpointNetworks nets(dir);
    try {
        nets.require_all();
        FAIL("expected a missing checkpoint");
    } catch (const MissingCheckpointError& e) {
        CHECK(e.task() == gan::Task::roof_labels);
    }
    CHECK_THROWS_AS(nets.get(gan::Task::window_textures), MissingCheckpointError);
}

TEST_CASE("checkpoint networks evict the least recently used") {
    const auto dir = test::scratch_dir("chains-lru");
    const gan::Task tasks[] = {gan::Task::window_labels, gan::Task::window_textures, gan::Task::roof_labels};
    for (auto t : tasks) {
        auto c = gan::TrainConfig::for_task(t);
        c.net.resolution = 8;
        c.net.ngf = c.net.nef = c.net.ndf = 2;
        c.net.depth = c.net.encoder_depth = 1;
        c.net.disc_layers = 1;
        gan::GanModel(t, c).save(CheckpointNetworks::checkpoint_path(dir, t));
    }
    CheckpointNetworks nets(dir, 2);
    nets.get(tasks[0]);
    nets.get(tasks[1]);
    CHECK(nets.resident() == 2);
    nets.get(tasks[0]);  // refresh
    CHECK(nets.loads() == 2);
    nets.get(tasks[2]);  // evicts tasks[1]
    CHECK(nets.resident() == 2);
    CHECK(nets.loads() == 3);
    nets.get(tasks[0]);
    CHECK(nets.loads() == 3);
    nets.get(tasks[1]);
    CHECK(nets.loads() == 4);
    const auto net = nets.get(tasks[1]);
    CHECK(net->resolution() == 8);
    CHECK(net->encoder() != nullptr);
}

} // TEST_SUITE

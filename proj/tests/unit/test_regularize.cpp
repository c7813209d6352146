#include <cmath>
#include <random>

#include "doctest.h"
#include "mdetail/regularize/regularize.hpp"

using namespace mdetail;
using namespace mdetail::regularize;

namespace {

DetailBox box(Label label, double x, double y, double w, double h) {
    DetailBox b;
    b.label = label;
    b.rect = {x, y, w, h};
    return b;
}

/// Rows × cols grid of w × h windows with 3 m horizontal and 4 m vertical pitch.
std::vector<DetailBox> window_grid(int rows, int cols, double w, double h) {
    std::vector<DetailBox> out;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out.push_back(box(Label::window, 1.0 + 3.0 * c, 1.0 + 4.0 * r, w, h));
    return out;
}

Image pane_grid(int w, int h, int nx, int ny) {
    Image m(w, h, 1, 0.0f);
    const int cw = w / nx, ch = h / ny;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int cx = x % cw, cy = y % ch;
            m.at(x, y) = cx >= 1 && cx < cw - 1 && cy >= 1 && cy < ch - 1;
        }
    return m;
}

RoofLayout square_pitches() {
    RoofLayout layout;
    RoofPitch left{{{0, 0}, {5, 0}, {5, 10}, {0, 10}}, 0.0, false};
    RoofPitch right{{{5, 0}, {10, 0}, {10, 10}, {5, 10}}, 0.0, false};
    layout.pitches = {left, right};
    return layout;
}

void fill(LabelGrid& g, int x0, int y0, int x1, int y1, Label l) {
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) g.at(x, y) = l;
}

} // namespace

TEST_SUITE("regularize") {

TEST_CASE("mean shift finds separated modes") {
    const std::vector<double> s{1.0, 1.05, 1.1, 3.0, 3.1};
    const auto fit = mean_shift_1d(s);
    REQUIRE(fit.modes.size() == 2);
    CHECK(fit.modes[0] == doctest::Approx(1.05));
    CHECK(fit.modes[1] == doctest::Approx(3.05));
    CHECK(fit.assignment == std::vector<int>{0, 0, 0, 1, 1});
    CHECK(mean_shift_1d(std::vector<double>{}).modes.empty());
}

TEST_CASE("connected components are 4-connected") {
    LabelGrid g(5, 5, Label::wall);
    g.at(1, 1) = Label::window;
    g.at(2, 2) = Label::window;
    g.at(2, 3) = Label::window;
    const auto comps = connected_components(g, Label::window);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].pixels.size() == 1);
    CHECK(comps[1].pixels.size() == 2);
    CHECK(comps[1].min_row == 2);
    CHECK(comps[1].max_row == 3);
}

TEST_CASE("a perfect window grid is a fixed point") {
    const auto grid = window_grid(3, 4, 1.2, 1.5);
    const auto out = regularize_window_boxes(grid, {14, 13});
    REQUIRE(out.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(out[i].rect.x == doctest::Approx(grid[i].rect.x).epsilon(1e-9));
        CHECK(out[i].rect.y == doctest::Approx(grid[i].rect.y).epsilon(1e-9));
        CHECK(out[i].rect.w == doctest::Approx(1.2).epsilon(1e-9));
        CHECK(out[i].rect.h == doctest::Approx(1.5).epsilon(1e-9));
    }
}

TEST_CASE("a rasterized grid is recovered from labels") {
    const double ppm = 20;
    LabelGrid g(280, 260, Label::wall);
    const auto grid = window_grid(3, 4, 1.2, 1.5);
    paint_boxes(g, {g.width, g.height, ppm}, grid);
    const auto out = regularize_facade_windows(g, ppm);
    REQUIRE(out.size() == grid.size());
    for (const auto& b : out) {
        CHECK(b.rect.w == doctest::Approx(1.2).epsilon(1e-6));
        CHECK(b.rect.h == doctest::Approx(1.5).epsilon(1e-6));
    }
    CHECK(regularize_facade_windows(LabelGrid(10, 10, Label::wall), ppm).empty());
}

TEST_CASE("jittered extents snap to one value near the truth") {
    auto grid = window_grid(3, 4, 1.2, 1.5);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    for (auto& b : grid) {
        const Vec2 c = b.rect.center();
        b.rect.w = 1.2 + jitter(rng);
        b.rect.h = 1.5 + jitter(rng);
        b.rect.x = c.x() - 0.5 * b.rect.w;
        b.rect.y = c.y() - 0.5 * b.rect.h;
    }
    const auto out = regularize_window_boxes(grid, {14, 13});
    for (const auto& b : out) {
        CHECK(b.rect.w == doctest::Approx(out[0].rect.w).epsilon(1e-12));
        CHECK(b.rect.h == doctest::Approx(out[0].rect.h).epsilon(1e-12));
    }
    CHECK(std::abs(out[0].rect.w - 1.2) <= 0.04);
    CHECK(std::abs(out[0].rect.h - 1.5) <= 0.04);
    const auto again = regularize_window_boxes(out, {14, 13});
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(std::abs(again[i].rect.x - out[i].rect.x) <= 1e-6);
        CHECK(std::abs(again[i].rect.y - out[i].rect.y) <= 1e-6);
        CHECK(std::abs(again[i].rect.w - out[i].rect.w) <= 1e-6);
        CHECK(std::abs(again[i].rect.h - out[i].rect.h) <= 1e-6);
    }
}

TEST_CASE("two height modes are preserved") {
    std::vector<DetailBox> boxes;
    for (int c = 0; c < 4; ++c) boxes.push_back(box(Label::window, 1.0 + 3.0 * c, 1.0, 1.2, 1.0 + 0.02 * c));
    for (int c = 0; c < 4; ++c) boxes.push_back(box(Label::window, 1.0 + 3.0 * c, 4.0, 1.2, 2.0 - 0.02 * c));
    const auto out = regularize_window_boxes(boxes, {14, 8});
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(out[std::size_t(i)].rect.h - 1.03) < 0.05);
        CHECK(std::abs(out[std::size_t(i + 4)].rect.h - 1.97) < 0.05);
    }
}

TEST_CASE("window regularizer keeps count, order and avoids overlaps") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.15, 0.15);
    for (int trial = 0; trial < 30; ++trial) {
        auto grid = window_grid(2 + trial % 3, 3 + trial % 2, 1.0 + 0.05 * (trial % 5), 1.4);
        for (auto& b : grid) {
            b.rect.x += u(rng);
            b.rect.y += u(rng);
            b.rect.w += u(rng) / 2;
        }
        const auto out = regularize_window_boxes(grid, {16, 14});
        REQUIRE(out.size() == grid.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK(out[i].label == grid[i].label);
            CHECK(std::abs(out[i].rect.center().x() - grid[i].rect.center().x()) < 0.5);
            for (std::size_t j = i + 1; j < out.size(); ++j) CHECK_FALSE(out[i].rect.overlaps(out[j].rect));
        }
    }
}

TEST_CASE("rows and columns group by center") {
    const auto grid = window_grid(3, 4, 1.2, 1.5);
    const auto rows = group_rows(grid);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].size() == 4);
    CHECK(group_columns(grid).size() == 4);
}

TEST_CASE("sills on 3 of 5 windows propagate to the rest") {
    auto windows = window_grid(1, 5, 1.2, 1.5);
    std::vector<DetailBox> sills;
    for (int k : {0, 2, 4}) sills.push_back(box(Label::sill, windows[std::size_t(k)].rect.x - 0.1, 0.8, 1.4, 0.2));
    const auto out = regularize_detail_boxes(sills, windows, {16, 6});
    CHECK(out.size() == 5);
    int propagated = 0;
    for (const auto& d : out) {
        propagated += d.source == BoxSource::propagated;
        CHECK(d.rect.top() == doctest::Approx(1.0));
    }
    CHECK(propagated == 2);
}

TEST_CASE("sills on 2 of 4 windows stay as they are") {
    const auto windows = window_grid(1, 4, 1.2, 1.5);
    std::vector<DetailBox> sills;
    for (int k : {0, 1}) sills.push_back(box(Label::sill, windows[std::size_t(k)].rect.x, 0.8, 1.2, 0.2));
    const auto out = regularize_detail_boxes(sills, windows, {13, 6});
    CHECK(out == sills);
}

TEST_CASE("a sill 0.1 m below its window is snapped flush") {
    const auto windows = window_grid(1, 1, 1.2, 1.5);
    const auto out = regularize_detail_boxes({box(Label::sill, 1.0, 0.7, 1.2, 0.2)}, windows, {4, 4});
    REQUIRE(out.size() == 1);
    CHECK(out[0].rect.top() == doctest::Approx(1.0));
    CHECK(out[0].source == BoxSource::snapped);
    const auto far = regularize_detail_boxes({box(Label::sill, 1.0, 0.3, 1.2, 0.2)}, windows, {4, 4});
    CHECK(far[0].rect.y == doctest::Approx(0.3));
    CHECK(far[0].source == BoxSource::raw);
}

TEST_CASE("details are fitted from the full label map") {
    const double ppm = 10;
    LabelGrid g(60, 40, Label::wall);
    const auto windows = window_grid(1, 1, 1.2, 1.5);
    paint_boxes(g, {g.width, g.height, ppm}, windows);
    paint_boxes(g, {g.width, g.height, ppm}, std::vector{box(Label::sill, 1.0, 0.8, 1.2, 0.2)});
    const auto out = regularize_facade_details(g, ppm, windows);
    REQUIRE(out.size() == 1);
    CHECK(out[0].label == Label::sill);
    CHECK(out[0].rect.top() == doctest::Approx(1.0));
}

TEST_CASE("a separable pane grid is a fixed point") {
    const Image m = pane_grid(30, 24, 2, 3);
    CHECK(regularize_window_panes(m) == m);
    CHECK(regularize_window_panes(Image(9, 7, 1, 0.0f)) == Image(9, 7, 1, 0.0f));
}

TEST_CASE("salt and pepper noise is removed from a pane grid") {
    const Image clean = pane_grid(40, 60, 2, 3);
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Image noisy = clean;
        for (float& v : noisy.data())
            if (rng() % 100 < 5) v = 1.0f - v;
        CHECK(regularize_window_panes(noisy) == clean);
    }
}

TEST_CASE("pane output is the outer product of its own profiles") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        Image m(16, 12, 1, 0.0f);
        for (float& v : m.data()) v = rng() % 3 != 0;
        const Image out = regularize_window_panes(m);
        std::vector<bool> col(16, false), row(12, false);
        for (int y = 0; y < 12; ++y)
            for (int x = 0; x < 16; ++x)
                if (out.at(x, y) != 0) col[std::size_t(x)] = row[std::size_t(y)] = true;
        for (int y = 0; y < 12; ++y)
            for (int x = 0; x < 16; ++x) CHECK((out.at(x, y) != 0) == (col[std::size_t(x)] && row[std::size_t(y)]));
    }
}

TEST_CASE("pane labels keep background and mark window elsewhere") {
    LabelGrid g(10, 10, Label::window);
    fill(g, 0, 0, 10, 1, Label::background);
    fill(g, 2, 2, 8, 8, Label::pane);
    const auto out = regularize_pane_labels(g);
    CHECK(out.at(0, 0) == Label::background);
    CHECK(out.at(5, 5) == Label::pane);
    CHECK(out.at(1, 5) == Label::window);
}

TEST_CASE("a 4 square meter blob becomes a 2 m square at its centroid") {
    const double ppm = 10;
    LabelGrid g(100, 100, Label::roof);
    fill(g, 10, 30, 30, 50, Label::chimney);
    const auto out = regularize_roof_labels(g, ppm, square_pitches());
    REQUIRE(out.size() == 1);
    CHECK(out[0].rect.w == doctest::Approx(2.0));
    CHECK(out[0].rect.h == doctest::Approx(2.0));
    CHECK(out[0].rect.center().x() == doctest::Approx(2.0));
    CHECK(out[0].rect.center().y() == doctest::Approx(6.0));
    CHECK(out[0].pitch == 0);
}

TEST_CASE("a circular blob keeps its pixel area") {
    const double ppm = 10;
    LabelGrid g(100, 100, Label::roof);
    int count = 0;
    const double r_px = std::sqrt(4.0 / M_PI) * ppm;
    for (int y = 0; y < 100; ++y)
        for (int x = 0; x < 100; ++x)
            if (std::hypot(x + 0.5 - 25, y + 0.5 - 50) <= r_px) {
                g.at(x, y) = Label::roof_window;
                ++count;
            }
    const auto out = regularize_roof_labels(g, ppm, square_pitches());
    REQUIRE(out.size() == 1);
    CHECK(out[0].rect.area() == doctest::Approx(count / (ppm * ppm)).epsilon(1e-9));
    CHECK(std::abs(out[0].rect.area() - 4.0) < 0.1);
}

TEST_CASE("tiny blobs are removed") {
    const double ppm = 10;
    LabelGrid g(100, 100, Label::roof);
    fill(g, 20, 20, 22, 22, Label::chimney);  // r ≈ 0.11 m
    CHECK(regularize_roof_labels(g, ppm, square_pitches()).empty());
}

TEST_CASE("a straddling blob goes to its majority pitch and is shrunk inside it") {
    const double ppm = 10;
    LabelGrid g(100, 100, Label::roof);
    fill(g, 32, 40, 62, 70, Label::chimney);  // 18 of 30 columns left of x = 5 m
    const auto layout = square_pitches();
    const auto out = regularize_roof_labels(g, ppm, layout);
    REQUIRE(out.size() == 1);
    CHECK(out[0].pitch == 0);
    CHECK(out[0].source == BoxSource::snapped);
    for (const auto& p : box_corners(out[0])) CHECK(p.x() <= 5.0 + 1e-9);
}

TEST_CASE("blobs on a dormer are removed") {
    const double ppm = 10;
    LabelGrid g(100, 100, Label::roof);
    fill(g, 10, 30, 30, 50, Label::chimney);
    auto layout = square_pitches();
    layout.dormers = {Rect{1.5, 5.5, 1, 1}};
    CHECK(regularize_roof_labels(g, ppm, layout).empty());
}

TEST_CASE("roof features follow the gutter and are idempotent") {
    RoofLayout layout;
    layout.pitches = {{{{0, 0}, {10, 0}, {10, 10}, {0, 10}}, 30.0, false}};
    const auto out = regularize_roof_boxes({box(Label::chimney, 4, 4, 1, 1)}, layout);
    REQUIRE(out.size() == 1);
    CHECK(out[0].rotation_deg == doctest::Approx(30.0));
    CHECK(out[0].rect.area() == doctest::Approx(1.0));
    const auto again = regularize_roof_boxes(out, layout);
    REQUIRE(again.size() == 1);
    CHECK(again[0].rect.x == doctest::Approx(out[0].rect.x).epsilon(1e-9));
    CHECK(again[0].rect.w == doctest::Approx(out[0].rect.w).epsilon(1e-9));
}

TEST_CASE("roof windows are dropped on flat pitches") {
    RoofLayout layout;
    layout.pitches = {{{{0, 0}, {10, 0}, {10, 10}, {0, 10}}, 0.0, true}};
    CHECK(regularize_roof_boxes({box(Label::roof_window, 4, 4, 1, 1)}, layout).empty());
    CHECK(regularize_roof_boxes({box(Label::chimney, 4, 4, 1, 1)}, layout).size() == 1);
}

TEST_CASE("source names round trip") {
    for (auto s : {BoxSource::raw, BoxSource::snapped, BoxSource::propagated})
        CHECK(source_from_name(source_name(s)) == s);
}

} // TEST_SUITE

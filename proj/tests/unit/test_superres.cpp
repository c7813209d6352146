#include <random>

#include "doctest.h"
#include "mdetail/chains/chains.hpp"
#include "stubs.hpp"

using namespace mdetail;
using namespace mdetail::chains;

namespace {

class IdentityNetwork : public Network {
public:
    explicit IdentityNetwork(int res) : res_(res) {}
    int resolution() const override { return res_; }
    Image translate(const Image& input, const style::StyleVector&) const override { return input; }

private:
    int res_;
};

Image random_texture(int w, int h, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> u(-1, 1);
    Image img(w, h, 3);
    for (float& v : img.data()) v = u(rng);
    return img;
}

} // namespace

TEST_SUITE("superres") {

TEST_CASE("patch origins cover the axis with the requested overlap") {
    CHECK(patch_origins(512, 256, 32) == std::vector<int>{0, 224, 256});
    CHECK(patch_origins(256, 256, 32) == std::vector<int>{0});
    CHECK(patch_origins(100, 256, 32) == std::vector<int>{0});
    CHECK(patch_origins(480, 256, 32) == std::vector<int>{0, 224});
    CHECK_THROWS_AS(patch_origins(100, 32, 32), Error);
    for (int length = 33; length < 300; length += 7) {
        const auto o = patch_origins(length, 32, 8);
        CHECK(o.front() == 0);
        CHECK(o.back() == length - 32);
        for (std::size_t i = 1; i < o.size(); ++i) CHECK(o[i - 1] + 32 - o[i] >= 8);
    }
}

TEST_CASE("a 512x256 texture at patch 256 needs three patches") {
    // The height equals one patch, so a single row of origins covers it.
    const auto g = make_patch_grid(512, 256, 256, 32);
    CHECK(g.xs.size() == 3);
    CHECK(g.ys.size() == 1);
    CHECK(g.count() == 3);
}

TEST_CASE("ramp weights of neighbouring patches sum to one") {
    const int patch = 32, overlap = 8, stride = patch - overlap;
    for (int t = stride; t < patch; ++t) {
        const double a = ramp_weight(t, patch, overlap, true, false);
        const double b = ramp_weight(t - stride, patch, overlap, false, true);
        CHECK(a + b == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(ramp_weight(0, patch, overlap, true, true) == 1.0);
}

TEST_CASE("identity network reproduces the bilinear upsample") {
    const IdentityNetwork net(32);
    for (auto [w, h] : {std::pair{8, 8}, {40, 17}, {64, 64}, {90, 23}}) {
        const Image tex = random_texture(w, h, unsigned(w * h));
        const Image out = run_super_resolution(tex, {}, net, 8);
        CHECK(out == resize_bilinear(tex, 2 * w, 2 * h));
    }
}

TEST_CASE("a single patch returns the network output") {
    const test::StubNetwork net(gan::Task::facade_textures, 32);
    const Image tex = random_texture(16, 16, 3);
    style::StyleVector z;
    z[0] = 0.4;
    CHECK(run_super_resolution(tex, z, net, 8) == net.translate(resize_bilinear(tex, 32, 32), z));
}

TEST_CASE("invalid inputs are rejected") {
    const IdentityNetwork net(32);
    CHECK_THROWS_AS(run_super_resolution(random_texture(7, 20, 1), {}, net, 8), Error);
    CHECK_THROWS_AS(run_super_resolution(random_texture(20, 20, 1), {}, net, 1), Error);
    CHECK_THROWS_AS(run_super_resolution(Image(20, 20, 1), {}, net, 8), Error);
}

} // TEST_SUITE

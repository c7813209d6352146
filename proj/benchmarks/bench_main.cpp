#include <random>

#include <benchmark/benchmark.h>

#include "mdetail/chains/chains.hpp"
#include "mdetail/gan/conditioning.hpp"
#include "mdetail/gan/model.hpp"
#include "mdetail/regularize/regularize.hpp"

using namespace mdetail;

namespace {

Image random_mask(int n, unsigned seed, double density) {
    std::mt19937 rng(seed);
    std::bernoulli_distribution on(density);
    Image mask(n, n, 1, 0.0f);
    for (float& v : mask.data()) v = on(rng) ? 1.0f : 0.0f;
    return mask;
}

Image random_image(int w, int h, int channels, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> u(-1, 1);
    Image img(w, h, channels);
    for (float& v : img.data()) v = u(rng);
    return img;
}

/// Forwards the input unchanged; isolates the patch bookkeeping cost.
class IdentityNetwork : public chains::Network {
public:
    explicit IdentityNetwork(int res) : res_(res) {}
    int resolution() const override { return res_; }
    Image translate(const Image& input, const style::StyleVector&) const override { return input; }

private:
    int res_;
};

void BM_DistanceTransform(benchmark::State& state) {
    const int n = int(state.range(0));
    const Image sites = random_mask(n, 1, 0.01);
    for (auto _ : state) benchmark::DoNotOptimize(gan::squared_distance_transform(sites, true));
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_DistanceTransform)->Arg(64)->Arg(256)->Arg(512);

void BM_ContextDistances(benchmark::State& state) {
    const int n = int(state.range(0));
    Image mask(n, n, 1, 0.0f);
    for (int y = n / 8; y < n - n / 8; ++y)
        for (int x = n / 8; x < n - n / 8; ++x) mask.at(x, y) = 1.0f;
    for (auto _ : state) benchmark::DoNotOptimize(gan::context_distances(mask, 12.8));
}
BENCHMARK(BM_ContextDistances)->Arg(256)->Arg(512);

void BM_MeanShift(benchmark::State& state) {
    std::mt19937 rng(2);
    std::normal_distribution<double> noise(0, 0.05);
    std::vector<double> samples;
    for (int i = 0; i < state.range(0); ++i) samples.push_back(1.2 * (i % 5) + noise(rng));
    for (auto _ : state) benchmark::DoNotOptimize(regularize::mean_shift_1d(samples));
}
BENCHMARK(BM_MeanShift)->Arg(32)->Arg(256)->Arg(2048);

void BM_SuperResolution(benchmark::State& state) {
    const int w = int(state.range(0));
    const Image tex = random_image(w, w / 2, 3, 3);
    const IdentityNetwork net(256);
    for (auto _ : state) benchmark::DoNotOptimize(chains::run_super_resolution(tex, {}, net, 32));
}
BENCHMARK(BM_SuperResolution)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_GeneratorForward(benchmark::State& state) {
    const auto task = gan::Task::facade_textures;
    auto config = gan::TrainConfig::for_task(task);
    config.net.resolution = int(state.range(0));
    const gan::GanModel model(task, config);
    const Image input = random_image(config.net.resolution, config.net.resolution,
                                     gan::input_channels(gan::task_info(task)), 4);
    const style::StyleVector z;
    for (auto _ : state) benchmark::DoNotOptimize(model.generate(input, z));
}
BENCHMARK(BM_GeneratorForward)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();

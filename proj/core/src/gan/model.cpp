#include "mdetail/gan/model.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "mdetail/error.hpp"
#include "mdetail/gan/losses.hpp"
#include "mdetail/gan/networks.hpp"

namespace mdetail::gan {

namespace {

constexpr std::int64_t kCheckpointVersion = 1;

torch::Tensor to_tensor(const Image& img) {
    auto t = torch::from_blob(const_cast<float*>(img.data().data()), {img.height(), img.width(), img.channels()},
                              torch::kFloat32);
    return t.permute({2, 0, 1}).contiguous();
}

Image to_image(const torch::Tensor& chw) {
    const auto t = chw.detach().to(torch::kFloat32).permute({1, 2, 0}).contiguous();
    Image out(int(t.size(1)), int(t.size(0)), int(t.size(2)));
    std::copy(t.data_ptr<float>(), t.data_ptr<float>() + t.numel(), out.data().begin());
    return out;
}

torch::Tensor style_tensor(const style::StyleVector& z, int dim) {
    if (dim == 0) return torch::zeros({1, 0});
    if (z.dim() != dim) throw Error("style dimension mismatch");
    std::vector<float> v(z.values().begin(), z.values().end());
    return torch::tensor(v).view({1, dim});
}

style::StyleVector to_style(const torch::Tensor& t) {
    const auto c = t.detach().to(torch::kFloat64).contiguous();
    return style::StyleVector(std::vector<double>(c.data_ptr<double>(), c.data_ptr<double>() + c.numel()));
}

Batch make_batch(const std::vector<TrainPair>& data, const std::vector<std::size_t>& idx) {
    std::vector<torch::Tensor> in, content, target;
    for (std::size_t i : idx) {
        in.push_back(to_tensor(data[i].input));
        content.push_back(to_tensor(data[i].content));
        target.push_back(to_tensor(data[i].target));
    }
    return {torch::stack(in), torch::stack(content), torch::stack(target)};
}

} // namespace

struct GanModel::Impl {
    Task task;
    TrainConfig config;
    GanNets nets;
};

void set_deterministic(bool on) {
    if (on) torch::set_num_threads(1);
    at::globalContext().setDeterministicAlgorithms(on, false);
}

GanModel::GanModel(Task task, const TrainConfig& config) {
    torch::manual_seed(config.seed);
    impl_ = std::make_shared<Impl>(Impl{task, config, GanNets::create(config.net)});
}

GanModel::GanModel(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

Task GanModel::task() const { return impl_->task; }
const TrainConfig& GanModel::config() const { return impl_->config; }
int GanModel::resolution() const { return impl_->config.net.resolution; }
bool GanModel::styled() const { return impl_->nets.styled(); }
int GanModel::style_dim() const { return impl_->config.net.style_dim; }
GanNets& GanModel::nets() { return impl_->nets; }

void GanModel::save(const std::filesystem::path& path) const {
    torch::serialize::OutputArchive archive;
    archive.write("format_version", torch::tensor(kCheckpointVersion));
    archive.write("config", c10::IValue(config_to_json(impl_->task, impl_->config)));
    archive.write("style_dim", torch::tensor(std::int64_t(impl_->config.net.style_dim)));
    torch::serialize::OutputArchive g, e, d;
    impl_->nets.generator->save(g);
    archive.write("generator", g);
    if (impl_->nets.styled()) {
        impl_->nets.encoder->save(e);
        archive.write("encoder", e);
    }
    impl_->nets.discriminator->save(d);
    archive.write("discriminator", d);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    archive.save_to(path.string());
}

GanModel GanModel::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error("checkpoint not found: " + path.string());
    torch::serialize::InputArchive archive;
    archive.load_from(path.string());
    torch::Tensor version;
    archive.read("format_version", version);
    if (version.item<std::int64_t>() != kCheckpointVersion)
        throw Error("unsupported checkpoint version in " + path.string());
    c10::IValue config_value;
    archive.read("config", config_value);
    const std::string text = config_value.toStringRef();
    const Task task = task_from_config_json(text);
    const TrainConfig config = config_from_json(text, TrainConfig::for_task(task));
    auto impl = std::make_shared<Impl>(Impl{task, config, GanNets::create(config.net)});
    torch::serialize::InputArchive g, d;
    archive.read("generator", g);
    impl->nets.generator->load(g);
    if (impl->nets.styled()) {
        torch::serialize::InputArchive e;
        archive.read("encoder", e);
        impl->nets.encoder->load(e);
    }
    archive.read("discriminator", d);
    impl->nets.discriminator->load(d);
    return GanModel(std::move(impl));
}

Image GanModel::generate(const Image& input, const style::StyleVector& z) const {
    const NetConfig& n = impl_->config.net;
    if (input.width() != n.resolution || input.height() != n.resolution)
        throw Error("generate: input is " + std::to_string(input.width()) + "x" + std::to_string(input.height()) +
                    ", network expects " + std::to_string(n.resolution));
    if (input.channels() != n.in_channels)
        throw Error("generate: expected " + std::to_string(n.in_channels) + " input channels, got " +
                    std::to_string(input.channels()));
    torch::NoGradGuard no_grad;
    const auto out = impl_->nets.generator->forward(to_tensor(input).unsqueeze(0), style_tensor(z, n.style_dim));
    return to_image(out[0]);
}

Image GanModel::generate(const ConditionedInput& input, const style::StyleVector& z) const {
    if (!info().conditioned) return generate(input.content, z);
    return generate(input.stacked(), z);
}

std::pair<style::StyleVector, style::StyleVector> GanModel::encode(const Image& image) const {
    if (!styled()) throw Error("encode: task has no style encoder");
    if (image.width() != resolution() || image.height() != resolution() || image.channels() != 3)
        throw Error("encode: expected a " + std::to_string(resolution()) + "x" + std::to_string(resolution()) +
                    " RGB image");
    torch::NoGradGuard no_grad;
    auto [mu, lv] = impl_->nets.encoder->forward(to_tensor(image).unsqueeze(0));
    return {to_style(mu[0]), to_style(lv[0])};
}

style::StyleVector GanModel::encode_mean(const Image& image) const { return encode(image).first; }

std::pair<double, double> GanModel::evaluate(const std::vector<TrainPair>& data) const {
    if (data.empty()) return {0.0, 0.0};
    torch::NoGradGuard no_grad;
    auto& nets = impl_->nets;
    double l1 = 0, kl = 0;
    const std::size_t bs = std::size_t(std::max(1, impl_->config.batch_size));
    for (std::size_t start = 0; start < data.size(); start += bs) {
        std::vector<std::size_t> idx;
        for (std::size_t i = start; i < std::min(data.size(), start + bs); ++i) idx.push_back(i);
        const Batch batch = make_batch(data, idx);
        torch::Tensor z;
        if (nets.styled()) {
            auto [mu, lv] = nets.encoder->forward(batch.target);
            z = mu;
            kl += kl_loss(mu, lv).item<double>();
        } else {
            z = torch::zeros({std::int64_t(idx.size()), 0});
        }
        const auto fake = nets.generator->forward(batch.input, z);
        l1 += (batch.target - fake).abs().mean().item<double>() * double(idx.size());
    }
    const double n = double(data.size());
    const int k = std::max(1, impl_->config.net.style_dim);
    return {l1 / n, kl / n / k};
}

TrainHistory GanModel::train(const std::vector<TrainPair>& data, const std::vector<TrainPair>& validation,
                             const TrainOptions& options) {
    const TrainConfig& c = impl_->config;
    auto& nets = impl_->nets;
    TrainHistory history;
    if (c.epochs == 0) return history;
    if (data.empty()) throw Error("train: empty dataset");
    for (const auto& p : data)
        if (p.input.width() != c.net.resolution || p.input.height() != c.net.resolution ||
            p.input.channels() != c.net.in_channels || p.target.channels() != 3 ||
            p.content.channels() != c.net.content_channels)
            throw Error("train: pair does not match the network resolution/channels");

    set_deterministic(c.deterministic);
    torch::manual_seed(c.seed + 1);
    std::mt19937_64 shuffle_rng(c.seed + 2);

    torch::optim::Adam opt_d(nets.discriminator->parameters(),
                             torch::optim::AdamOptions(c.learning_rate).betas({c.beta1, c.beta2}));
    torch::optim::Adam opt_ge(nets.generator_encoder_parameters(),
                              torch::optim::AdamOptions(c.learning_rate).betas({c.beta1, c.beta2}));
    nets.train(true);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t bs = std::size_t(c.batch_size);
    int batch_counter = 0;
    for (int epoch = 1; epoch <= c.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        EpochLosses sums;
        sums.epoch = epoch;
        int batches = 0;
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const std::vector<std::size_t> idx(order.begin() + std::ptrdiff_t(start),
                                               order.begin() + std::ptrdiff_t(std::min(order.size(), start + bs)));
            const Batch batch = make_batch(data, idx);
            const StyleNoise noise = StyleNoise::draw(int(idx.size()), c.net.style_dim, torch::kFloat32);

            torch::Tensor mu, lv, z;
            if (nets.styled()) {
                std::tie(mu, lv) = nets.encoder->forward(batch.target);
                z = reparameterize(mu, lv, noise.eps);
            } else {
                z = noise.eps;
            }
            const auto fake = nets.generator->forward(batch.input, z);

            opt_d.zero_grad();
            const auto ld = discriminator_loss(nets.discriminator->forward(batch.content, batch.target),
                                               nets.discriminator->forward(batch.content, fake.detach()));
            check_finite(ld, "L_D", c.divergence_bound, batch_counter);
            ld.backward();
            opt_d.step();

            opt_ge.zero_grad();
            const auto gan = generator_gan_loss(nets.discriminator->forward(batch.content, fake));
            const auto l1 = mdetail::gan::l1_loss(batch.target, fake);
            torch::Tensor kl = torch::zeros({}), lr = torch::zeros({});
            if (nets.styled()) {
                kl = kl_loss(mu, lv);
                const auto random_fake = nets.generator->forward(batch.input, noise.z_prior);
                // Freezing E here still lets the gradient reach G through the fake image.
                const bool freeze = !c.lr_updates_encoder;
                if (freeze)
                    for (auto& p : nets.encoder->parameters()) p.requires_grad_(false);
                lr = style_reconstruction_loss(noise.z_prior, nets.encoder->forward(random_fake).first);
                if (freeze)
                    for (auto& p : nets.encoder->parameters()) p.requires_grad_(true);
            }
            const auto total = weighted_total(c, gan, l1, kl, lr);
            check_finite(total, "L_G", c.divergence_bound, batch_counter);
            total.backward();
            opt_ge.step();

            const std::array<double, 5> values{ld.item<double>(), gan.item<double>(), l1.item<double>(),
                                               kl.item<double>(), lr.item<double>()};
            if (!history.first_step) history.first_step = values;
            sums.d += values[0];
            sums.gan += values[1];
            sums.l1 += values[2];
            sums.kl += values[3];
            sums.lr += values[4];
            ++batches;
            ++batch_counter;
        }
        sums.d /= batches;
        sums.gan /= batches;
        sums.l1 /= batches;
        sums.kl /= batches;
        sums.lr /= batches;
        std::tie(sums.val_l1, sums.val_kl_per_dim) = evaluate(validation.empty() ? data : validation);
        history.epochs.push_back(sums);
        if (options.checkpoint_dir) {
            char name[32];
            std::snprintf(name, sizeof name, "epoch-%03d.ckpt", epoch);
            save(*options.checkpoint_dir / name);
        }
        if (options.on_epoch) options.on_epoch(sums);
    }
    nets.train(false);
    return history;
}

std::vector<double> GanModel::flat_parameters() const {
    std::vector<double> out;
    auto append = [&](const std::vector<torch::Tensor>& params) {
        for (const auto& p : params) {
            const auto t = p.detach().to(torch::kFloat64).contiguous().view(-1);
            out.insert(out.end(), t.data_ptr<double>(), t.data_ptr<double>() + t.numel());
        }
    };
    append(impl_->nets.generator->parameters());
    if (impl_->nets.styled()) append(impl_->nets.encoder->parameters());
    append(impl_->nets.discriminator->parameters());
    return out;
}

void write_loss_csv(const std::filesystem::path& path, const TrainHistory& history) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out.precision(9);
    out << "epoch,L_D,L_GAN_G,L_L1,L_KL,L_LR\n";
    for (const auto& e : history.epochs)
        out << e.epoch << ',' << e.d << ',' << e.gan << ',' << e.l1 << ',' << e.kl << ',' << e.lr << '\n';
}

void write_validation_csv(const std::filesystem::path& path, const TrainHistory& history) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out.precision(9);
    out << "epoch,val_L1,val_KL_per_dim\n";
    for (const auto& e : history.epochs) out << e.epoch << ',' << e.val_l1 << ',' << e.val_kl_per_dim << '\n';
}

} // namespace mdetail::gan

#include "mdetail/gan/losses.hpp"

#include <cmath>
#include <sstream>

#include "mdetail/error.hpp"

namespace mdetail::gan {

StyleNoise StyleNoise::draw(int batch, int style_dim, torch::Dtype dtype) {
    const auto opts = torch::TensorOptions().dtype(dtype);
    if (style_dim == 0) return {torch::zeros({batch, 0}, opts), torch::zeros({batch, 0}, opts)};
    return {torch::randn({batch, style_dim}, opts), torch::randn({batch, style_dim}, opts)};
}

torch::Tensor discriminator_loss(const torch::Tensor& real_scores, const torch::Tensor& fake_scores) {
    const auto real = real_scores.clamp(kProbClip, 1.0 - kProbClip);
    const auto fake = fake_scores.clamp(kProbClip, 1.0 - kProbClip);
    return -torch::log(real).mean() - torch::log(1.0 - fake).mean();
}

torch::Tensor generator_gan_loss(const torch::Tensor& fake_scores) {
    return -torch::log(fake_scores.clamp(kProbClip, 1.0 - kProbClip)).mean();
}

torch::Tensor l1_loss(const torch::Tensor& target, const torch::Tensor& generated) {
    return (target - generated).abs().mean();
}

torch::Tensor kl_loss(const torch::Tensor& mean, const torch::Tensor& logvar) {
    return (0.5 * (mean.pow(2) + logvar.exp() - 1.0 - logvar)).sum();
}

torch::Tensor style_reconstruction_loss(const torch::Tensor& z, const torch::Tensor& reconstructed_mean) {
    return (z - reconstructed_mean).abs().mean();
}

torch::Tensor reparameterize(const torch::Tensor& mean, const torch::Tensor& logvar, const torch::Tensor& eps) {
    return mean + torch::exp(0.5 * logvar) * eps;
}

torch::Tensor weighted_total(const TrainConfig& c, const torch::Tensor& gan, const torch::Tensor& l1,
                             const torch::Tensor& kl, const torch::Tensor& lr) {
    return c.lambda_gan * gan + c.lambda_l1 * l1 + c.lambda_kl * kl + c.lambda_lr * lr;
}

namespace {

torch::Tensor encoded_style(GanNets& nets, const Batch& batch, const StyleNoise& noise, torch::Tensor* mean,
                            torch::Tensor* logvar) {
    if (!nets.styled()) return noise.eps;
    auto [mu, lv] = nets.encoder->forward(batch.target);
    if (mean) *mean = mu;
    if (logvar) *logvar = lv;
    return reparameterize(mu, lv, noise.eps);
}

} // namespace

torch::Tensor loss_discriminator(GanNets& nets, const Batch& batch, const StyleNoise& noise) {
    const auto z = encoded_style(nets, batch, noise, nullptr, nullptr);
    const auto fake = nets.generator->forward(batch.input, z);
    return discriminator_loss(nets.discriminator->forward(batch.content, batch.target),
                              nets.discriminator->forward(batch.content, fake));
}

LossComponents loss_generator_encoder(GanNets& nets, const Batch& batch, const StyleNoise& noise,
                                      const TrainConfig& config) {
    LossComponents out;
    torch::Tensor mu, lv;
    const auto z = encoded_style(nets, batch, noise, &mu, &lv);
    const auto fake = nets.generator->forward(batch.input, z);
    out.gan = generator_gan_loss(nets.discriminator->forward(batch.content, fake));
    out.l1 = mdetail::gan::l1_loss(batch.target, fake);
    if (nets.styled()) {
        out.kl = kl_loss(mu, lv);
        const auto random_fake = nets.generator->forward(batch.input, noise.z_prior);
        out.lr = style_reconstruction_loss(noise.z_prior, nets.encoder->forward(random_fake).first);
    } else {
        out.kl = torch::zeros({}, out.l1.options());
        out.lr = torch::zeros({}, out.l1.options());
    }
    out.total = weighted_total(config, out.gan, out.l1, out.kl, out.lr);
    return out;
}

void check_finite(const torch::Tensor& value, const char* name, double bound, int batch_index) {
    const double v = value.item<double>();
    if (!std::isfinite(v) || v > bound) {
        std::ostringstream msg;
        msg << "training diverged: " << name << " = " << v << " at batch " << batch_index;
        throw DivergenceError(msg.str());
    }
}

} // namespace mdetail::gan

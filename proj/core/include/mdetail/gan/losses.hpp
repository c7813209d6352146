#pragma once

#include <torch/torch.h>

#include "mdetail/gan/config.hpp"
#include "mdetail/gan/networks.hpp"

namespace mdetail::gan {

inline constexpr double kProbClip = 1e-7;

/// One training batch: full conditioned input (for G), the content channels
/// alone (for D) and the target image B.
struct Batch {
    torch::Tensor input;    ///< N×C×H×W
    torch::Tensor content;  ///< N×c×H×W
    torch::Tensor target;   ///< N×3×H×W
};

/// Explicit randomness so that losses are deterministic functions of the
/// parameters (required for finite-difference checks).
struct StyleNoise {
    torch::Tensor eps;      ///< N×k, reparameterization noise for Z ~ E(B)
    torch::Tensor z_prior;  ///< N×k, Z ~ N(0, I) for the style reconstruction term

    static StyleNoise draw(int batch, int style_dim, torch::Dtype dtype);
};

// Individual loss terms on precomputed activations.

/// E[−log D(A,B)] + E[−log(1 − D(A,G(A,Z)))], probabilities clipped to [1e-7, 1 − 1e-7].
torch::Tensor discriminator_loss(const torch::Tensor& real_scores, const torch::Tensor& fake_scores);
/// E[−log D(A,G(A,Z))].
torch::Tensor generator_gan_loss(const torch::Tensor& fake_scores);
/// E‖B − G(A,Z)‖₁ (per-element mean).
torch::Tensor l1_loss(const torch::Tensor& target, const torch::Tensor& generated);
/// D_KL(N(μ, σ²) ‖ N(0, I)) summed over style dimensions and over the batch, matching the
/// BicycleGAN reference trainer; λ_KL therefore weights each sample at 0.01.
torch::Tensor kl_loss(const torch::Tensor& mean, const torch::Tensor& logvar);
/// E‖Z − Ê(G(A,Z))‖₁ (per-element mean).
torch::Tensor style_reconstruction_loss(const torch::Tensor& z, const torch::Tensor& reconstructed_mean);
/// μ + exp(½ log σ²) ⊙ ε.
torch::Tensor reparameterize(const torch::Tensor& mean, const torch::Tensor& logvar, const torch::Tensor& eps);

struct LossComponents {
    torch::Tensor total;
    torch::Tensor gan;  ///< L_GAN^G
    torch::Tensor l1;
    torch::Tensor kl;
    torch::Tensor lr;
};

/// λ_GAN·gan + λ_L1·l1 + λ_KL·kl + λ_LR·lr.
torch::Tensor weighted_total(const TrainConfig& config, const torch::Tensor& gan, const torch::Tensor& l1,
                             const torch::Tensor& kl, const torch::Tensor& lr);

/// Discriminator objective with Z drawn from E(B) (prior when unstyled).
torch::Tensor loss_discriminator(GanNets& nets, const Batch& batch, const StyleNoise& noise);
/// Full generator/encoder objective with its components.
LossComponents loss_generator_encoder(GanNets& nets, const Batch& batch, const StyleNoise& noise,
                                      const TrainConfig& config);

/// Throws DivergenceError if `value` is non-finite or above `bound`.
void check_finite(const torch::Tensor& value, const char* name, double bound, int batch_index);

} // namespace mdetail::gan

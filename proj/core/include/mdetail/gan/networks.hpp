#pragma once

// libtorch-facing network definitions. Only training code and tests include
// this header; the inference API lives in model.hpp.

#include <torch/torch.h>

#include "mdetail/gan/config.hpp"

namespace mdetail::gan {

/// U-Net generator G(A, Z). The style vector is broadcast spatially and
/// concatenated to the input of every down-sampling level.
class GeneratorImpl : public torch::nn::Module {
public:
    explicit GeneratorImpl(const NetConfig& config);
    /// a: N×C×H×W, z: N×k (ignored when k = 0). Returns N×3×H×W in (−1, 1).
    torch::Tensor forward(const torch::Tensor& a, const torch::Tensor& z);

    const NetConfig& config() const { return config_; }

private:
    NetConfig config_;
    std::vector<torch::nn::Conv2d> down_;
    std::vector<torch::nn::ConvTranspose2d> up_;
    std::vector<torch::nn::InstanceNorm2d> down_norm_;
    std::vector<torch::nn::InstanceNorm2d> up_norm_;
};
TORCH_MODULE(Generator);

/// Encoder E(B) → (mean, log-variance) of the style posterior.
class EncoderImpl : public torch::nn::Module {
public:
    explicit EncoderImpl(const NetConfig& config);
    std::pair<torch::Tensor, torch::Tensor> forward(const torch::Tensor& b);

private:
    NetConfig config_;
    std::vector<torch::nn::Conv2d> convs_;
    std::vector<torch::nn::InstanceNorm2d> norms_;
    torch::nn::Linear mean_{nullptr};
    torch::nn::Linear logvar_{nullptr};
};
TORCH_MODULE(Encoder);

/// Patch discriminator D(A, B) → per-patch probabilities in (0, 1).
class DiscriminatorImpl : public torch::nn::Module {
public:
    explicit DiscriminatorImpl(const NetConfig& config);
    torch::Tensor forward(const torch::Tensor& a_content, const torch::Tensor& b);

private:
    NetConfig config_;
    std::vector<torch::nn::Conv2d> convs_;
    std::vector<torch::nn::InstanceNorm2d> norms_;
};
TORCH_MODULE(Discriminator);

/// The three networks trained together for one task. `encoder` is empty for
/// style-free (Pix2Pix) tasks.
struct GanNets {
    Generator generator{nullptr};
    Encoder encoder{nullptr};
    Discriminator discriminator{nullptr};

    static GanNets create(const NetConfig& config);
    bool styled() const { return !encoder.is_empty(); }
    void to(torch::Dtype dtype);
    void train(bool on);
    std::vector<torch::Tensor> generator_encoder_parameters() const;
};

torch::Tensor apply_activation(const torch::Tensor& x, Activation a);

} // namespace mdetail::gan

#include "mdetail/gan/networks.hpp"

#include <algorithm>

namespace mdetail::gan {

namespace nn = torch::nn;

namespace {

int level_channels(int base, int level) { return base * std::min(1 << level, 8); }

torch::Tensor tile_style(const torch::Tensor& z, const torch::Tensor& like) {
    return z.view({z.size(0), z.size(1), 1, 1}).expand({z.size(0), z.size(1), like.size(2), like.size(3)});
}

} // namespace

torch::Tensor apply_activation(const torch::Tensor& x, Activation a) {
    return a == Activation::silu ? torch::silu(x) : torch::leaky_relu(x, 0.2);
}

GeneratorImpl::GeneratorImpl(const NetConfig& config) : config_(config) {
    const int k = config.style_dim;
    for (int i = 0; i < config.depth; ++i) {
        const int in = (i == 0 ? config.in_channels : level_channels(config.ngf, i - 1)) + k;
        const int out = level_channels(config.ngf, i);
        down_.push_back(register_module("down" + std::to_string(i),
                                        nn::Conv2d(nn::Conv2dOptions(in, out, 4).stride(2).padding(1))));
        down_norm_.push_back(i > 0 && i < config.depth - 1
                                 ? register_module("down_norm" + std::to_string(i),
                                                   nn::InstanceNorm2d(nn::InstanceNorm2dOptions(out).affine(true)))
                                 : nn::InstanceNorm2d{nullptr});
    }
    for (int i = config.depth - 1; i >= 0; --i) {
        const int skip = level_channels(config.ngf, i);
        const int in = i == config.depth - 1 ? skip : 2 * skip;
        const int out = i == 0 ? 3 : level_channels(config.ngf, i - 1);
        up_.push_back(register_module("up" + std::to_string(i),
                                      nn::ConvTranspose2d(nn::ConvTranspose2dOptions(in, out, 4).stride(2).padding(1))));
        up_norm_.push_back(i > 0 ? register_module("up_norm" + std::to_string(i),
                                                   nn::InstanceNorm2d(nn::InstanceNorm2dOptions(out).affine(true)))
                                 : nn::InstanceNorm2d{nullptr});
    }
}

torch::Tensor GeneratorImpl::forward(const torch::Tensor& a, const torch::Tensor& z) {
    const bool styled = config_.style_dim > 0;
    std::vector<torch::Tensor> skips;
    torch::Tensor x = a;
    for (int i = 0; i < config_.depth; ++i) {
        if (styled) x = torch::cat({x, tile_style(z, x)}, 1);
        x = down_[std::size_t(i)](x);
        // No normalization on the outermost and innermost levels.
        if (config_.norm == Norm::instance && i > 0 && i < config_.depth - 1) x = down_norm_[std::size_t(i)](x);
        x = apply_activation(x, config_.activation);
        skips.push_back(x);
    }
    for (int j = 0; j < config_.depth; ++j) {
        const int level = config_.depth - 1 - j;
        if (j > 0) x = torch::cat({x, skips[std::size_t(level)]}, 1);
        x = up_[std::size_t(j)](x);
        if (level == 0) return torch::tanh(x);
        if (config_.norm == Norm::instance) x = up_norm_[std::size_t(j)](x);
        x = config_.activation == Activation::silu ? torch::silu(x) : torch::relu(x);
    }
    return x;
}

EncoderImpl::EncoderImpl(const NetConfig& config) : config_(config) {
    int in = 3;
    for (int i = 0; i < config.encoder_depth; ++i) {
        const int out = level_channels(config.nef, i);
        convs_.push_back(register_module("conv" + std::to_string(i),
                                         nn::Conv2d(nn::Conv2dOptions(in, out, 4).stride(2).padding(1))));
        norms_.push_back(i > 0 && i + 1 < config.encoder_depth
                             ? register_module("norm" + std::to_string(i),
                                               nn::InstanceNorm2d(nn::InstanceNorm2dOptions(out).affine(true)))
                             : nn::InstanceNorm2d{nullptr});
        in = out;
    }
    mean_ = register_module("mean", nn::Linear(in, config.style_dim));
    logvar_ = register_module("logvar", nn::Linear(in, config.style_dim));
}

std::pair<torch::Tensor, torch::Tensor> EncoderImpl::forward(const torch::Tensor& b) {
    torch::Tensor x = b;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
        x = convs_[i](x);
        if (config_.norm == Norm::instance && i > 0 && i + 1 < convs_.size()) x = norms_[i](x);
        x = apply_activation(x, config_.activation);
    }
    x = x.mean({2, 3});
    return {mean_(x), logvar_(x)};
}

DiscriminatorImpl::DiscriminatorImpl(const NetConfig& config) : config_(config) {
    int in = config.content_channels + 3;
    for (int i = 0; i < config.disc_layers; ++i) {
        const int out = level_channels(config.ndf, i);
        convs_.push_back(register_module("conv" + std::to_string(i),
                                         nn::Conv2d(nn::Conv2dOptions(in, out, 4).stride(2).padding(1))));
        norms_.push_back(i > 0 ? register_module("norm" + std::to_string(i),
                                                 nn::InstanceNorm2d(nn::InstanceNorm2dOptions(out).affine(true)))
                               : nn::InstanceNorm2d{nullptr});
        in = out;
    }
    convs_.push_back(register_module("score", nn::Conv2d(nn::Conv2dOptions(in, 1, 3).stride(1).padding(1))));
}

torch::Tensor DiscriminatorImpl::forward(const torch::Tensor& a_content, const torch::Tensor& b) {
    torch::Tensor x = torch::cat({a_content, b}, 1);
    for (std::size_t i = 0; i + 1 < convs_.size(); ++i) {
        x = convs_[i](x);
        if (config_.norm == Norm::instance && i > 0) x = norms_[i](x);
        x = apply_activation(x, config_.activation);
    }
    return torch::sigmoid(convs_.back()(x));
}

GanNets GanNets::create(const NetConfig& config) {
    GanNets nets;
    nets.generator = Generator(config);
    if (config.style_dim > 0) nets.encoder = Encoder(config);
    nets.discriminator = Discriminator(config);
    return nets;
}

void GanNets::to(torch::Dtype dtype) {
    generator->to(dtype);
    if (styled()) encoder->to(dtype);
    discriminator->to(dtype);
}

void GanNets::train(bool on) {
    generator->train(on);
    if (styled()) encoder->train(on);
    discriminator->train(on);
}

std::vector<torch::Tensor> GanNets::generator_encoder_parameters() const {
    auto params = generator->parameters();
    if (styled()) {
        auto e = encoder->parameters();
        params.insert(params.end(), e.begin(), e.end());
    }
    return params;
}

} // namespace mdetail::gan

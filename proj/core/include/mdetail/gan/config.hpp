#pragma once

#include <cstdint>
#include <string>

#include "mdetail/gan/tasks.hpp"

namespace mdetail::gan {

enum class Activation { leaky_relu, silu };
enum class Norm { none, instance };

/// Network shape. `depth` counts stride-2 levels of the U-Net generator.
struct NetConfig {
    int resolution = 64;
    int in_channels = 9;      ///< generator input channels
    int content_channels = 3; ///< A channels shown to the discriminator
    int style_dim = 8;        ///< 0 disables the encoder (Pix2Pix)
    int ngf = 16;
    int nef = 16;
    int ndf = 16;
    int depth = 4;
    int encoder_depth = 4;
    int disc_layers = 2;
    Activation activation = Activation::leaky_relu;
    Norm norm = Norm::instance;
};

/// Loss weights and optimizer settings.
struct TrainConfig {
    double lambda_gan = 1.0;
    double lambda_l1 = 10.0;
    double lambda_kl = 0.01;
    double lambda_lr = 0.5;
    int epochs = 30;
    int batch_size = 8;
    double learning_rate = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    bool is_label_gan = false;
    std::uint64_t seed = 1;
    bool deterministic = true;
    double divergence_bound = 1e4;
    /// When false the latent-regression term only trains G, as in BicycleGAN.
    bool lr_updates_encoder = false;
    NetConfig net;

    /// Defaults for a task: desk resolution, λ_L1 = 1 for label GANs.
    static TrainConfig for_task(Task task);
};

std::string config_to_json(Task task, const TrainConfig& config);
/// Parses a config document; fields that are absent keep `base`'s values.
TrainConfig config_from_json(const std::string& text, const TrainConfig& base);
Task task_from_config_json(const std::string& text);

} // namespace mdetail::gan

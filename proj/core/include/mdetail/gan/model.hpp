#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mdetail/gan/conditioning.hpp"
#include "mdetail/gan/config.hpp"
#include "mdetail/image.hpp"
#include "mdetail/style/style.hpp"

namespace mdetail::gan {

struct GanNets;

/// One matched pair. `input` is the full generator input (content plus
/// conditioning channels when the task uses them); `content` is what the
/// discriminator sees alongside B.
struct TrainPair {
    Image input;
    Image content;
    Image target;
};

struct EpochLosses {
    int epoch = 0;
    double d = 0;    ///< L_D
    double gan = 0;  ///< L_GAN^G
    double l1 = 0;
    double kl = 0;
    double lr = 0;
    double val_l1 = 0;         ///< ‖B − G(A, Ê(B))‖₁ on the validation set
    double val_kl_per_dim = 0; ///< L_KL / k on the validation set
};

struct TrainHistory {
    std::vector<EpochLosses> epochs;
    /// (L_D, L_GAN^G, L_L1, L_KL, L_LR) of the very first optimization step.
    std::optional<std::array<double, 5>> first_step;
};

struct TrainOptions {
    std::optional<std::filesystem::path> checkpoint_dir;  ///< writes epoch-NNN.ckpt when set
    std::function<void(const EpochLosses&)> on_epoch;
};

/// Generator, encoder and discriminator for one task, plus its config.
///
/// Inference (`generate`, `encode`) is const and reentrant; training mutates
/// parameters and must not run concurrently with inference on the same
/// model.
class GanModel : public style::StyleEncoder {
public:
    /// Fresh parameters initialized from `config.seed`.
    GanModel(Task task, const TrainConfig& config);

    static GanModel load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    Task task() const;
    const TaskInfo& info() const { return task_info(task()); }
    const TrainConfig& config() const;
    int resolution() const override;
    bool styled() const;
    int style_dim() const;

    /// G(A, Z). `input` must be resolution×resolution with the task's input
    /// channel count.
    Image generate(const Image& input, const style::StyleVector& z) const;
    Image generate(const ConditionedInput& input, const style::StyleVector& z) const;

    /// Mean and log-variance of E(B).
    std::pair<style::StyleVector, style::StyleVector> encode(const Image& image) const;
    style::StyleVector encode_mean(const Image& image) const override;

    TrainHistory train(const std::vector<TrainPair>& data, const std::vector<TrainPair>& validation,
                       const TrainOptions& options = {});

    /// Mean L1 of G(A, Ê(B)) against B and mean per-dimension KL.
    std::pair<double, double> evaluate(const std::vector<TrainPair>& data) const;

    /// All parameters flattened in registration order (G, E, D).
    std::vector<double> flat_parameters() const;

    GanNets& nets();

private:
    struct Impl;
    explicit GanModel(std::shared_ptr<Impl> impl);
    std::shared_ptr<Impl> impl_;
};

/// Loss history CSV: epoch,L_D,L_GAN_G,L_L1,L_KL,L_LR.
void write_loss_csv(const std::filesystem::path& path, const TrainHistory& history);
/// Validation CSV: epoch,val_L1,val_KL_per_dim.
void write_validation_csv(const std::filesystem::path& path, const TrainHistory& history);

/// Configures libtorch for bit-reproducible CPU execution.
void set_deterministic(bool on);

} // namespace mdetail::gan

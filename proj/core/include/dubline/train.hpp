#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dubline/radon.hpp"
#include "dubline/ssim.hpp"
#include "dubline/unfold.hpp"

namespace dubline {

struct TrainConfig {
    std::size_t epochs = 20;
    double initial_lr = 1e-4;
    std::size_t lr_decay_every = 10;
    double lr_decay_factor = 0.5;
    std::size_t batch_size = 4;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
    /// Learning rate in effect during zero-based epoch `epoch`.
    double learning_rate(std::size_t epoch) const;
};

struct EpochRecord {
    std::size_t epoch = 0;  ///< one-based
    double mean_loss = 0.0;
    double learning_rate = 0.0;
    double seconds = 0.0;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    std::string checkpoint_path;
};

struct LossAndGradients {
    double loss = 0.0;
    ModelGradients gradients;
};

/// loss = 1 - ssim(fused output, y) and its gradient for every parameter.
LossAndGradients loss_and_grad(const UnfoldedModel& model, const RadonOperator& op,
                               const Image& y, const SsimConfig& ssim_cfg);

/// Adaptive moment estimation over the model's float parameters. Moments are
/// kept in double precision.
class AdamOptimizer {
public:
    AdamOptimizer(const UnfoldedModel& model, double beta1, double beta2, double epsilon);

    void step(UnfoldedModel& model, const ModelGradients& grads, double learning_rate);
    std::size_t steps() const noexcept { return step_; }

private:
    double beta1_;
    double beta2_;
    double epsilon_;
    std::size_t step_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch training, shuffled per epoch by a generator seeded from
/// cfg.seed. Gradients are summed over the batch in index order and averaged.
TrainReport train(UnfoldedModel& model, const RadonOperator& op, std::span<const Image> dataset,
                  const TrainConfig& cfg, const SsimConfig& ssim_cfg,
                  const EpochCallback& on_epoch = {});

}  // namespace dubline

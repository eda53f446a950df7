#include "dubline/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "dubline/error.hpp"

namespace dubline {

void TrainConfig::validate() const {
    if (epochs < 1) throw InvalidArgument("training needs at least one epoch");
    if (!(initial_lr > 0.0)) throw InvalidArgument("learning rate must be > 0");
    if (lr_decay_every < 1) throw InvalidArgument("lr_decay_every must be >= 1");
    if (!(lr_decay_factor > 0.0) || lr_decay_factor > 1.0) {
        throw InvalidArgument("lr_decay_factor must be in (0, 1]");
    }
    if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
        throw InvalidArgument("invalid optimizer moment parameters");
    }
}

double TrainConfig::learning_rate(std::size_t epoch) const {
    const auto decays = static_cast<double>(epoch / lr_decay_every);
    return initial_lr * std::pow(lr_decay_factor, decays);
}

LossAndGradients loss_and_grad(const UnfoldedModel& model, const RadonOperator& op,
                               const Image& y, const SsimConfig& ssim_cfg) {
    const ForwardTrace trace = forward(model, op, y);
    Image grad_ssim;
    const double s = ssim_with_gradient(trace.fused, y, ssim_cfg, grad_ssim);
    grad_ssim.pixels() *= -1.0;
    LossAndGradients out;
    out.loss = 1.0 - s;
    out.gradients = backward(model, op, trace, grad_ssim);
    return out;
}

AdamOptimizer::AdamOptimizer(const UnfoldedModel& model, double beta1, double beta2,
                             double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
    for (auto p : model.parameters()) {
        m_.emplace_back(p.size(), 0.0);
        v_.emplace_back(p.size(), 0.0);
    }
}

void AdamOptimizer::step(UnfoldedModel& model, const ModelGradients& grads,
                         double learning_rate) {
    auto params = model.parameters();
    if (params.size() != m_.size() || grads.tensors.size() != m_.size()) {
        throw ShapeMismatch("optimizer state does not match the model");
    }
    ++step_;
    const double t = static_cast<double>(step_);
    const double bias1 = 1.0 - std::pow(beta1_, t);
    const double bias2 = 1.0 - std::pow(beta2_, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& m = m_[k];
        auto& v = v_[k];
        const auto& g = grads.tensors[k];
        if (g.size() != params[k].size()) throw ShapeMismatch("gradient tensor size mismatch");
        for (std::size_t i = 0; i < g.size(); ++i) {
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
            const double update = learning_rate * (m[i] / bias1) / (std::sqrt(v[i] / bias2) + epsilon_);
            params[k][i] = static_cast<float>(static_cast<double>(params[k][i]) - update);
        }
    }
    ++model.revision;
}

TrainReport train(UnfoldedModel& model, const RadonOperator& op, std::span<const Image> dataset,
                  const TrainConfig& cfg, const SsimConfig& ssim_cfg,
                  const EpochCallback& on_epoch) {
    cfg.validate();
    ssim_cfg.validate();
    if (dataset.empty()) throw InvalidArgument("training dataset is empty");
    for (const Image& img : dataset) {
        if (img.width() != op.image_width() || img.height() != op.image_height()) {
            throw ShapeMismatch("training image size differs from the operator");
        }
    }

    using clock = std::chrono::steady_clock;
    AdamOptimizer optimizer(model, cfg.beta1, cfg.beta2, cfg.epsilon);
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(dataset.size());
    TrainReport report;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto start = clock::now();
        const double lr = cfg.learning_rate(epoch);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);

        double loss_sum = 0.0;
        for (std::size_t first = 0; first < order.size(); first += cfg.batch_size) {
            const std::size_t last = std::min(order.size(), first + cfg.batch_size);
            ModelGradients batch = ModelGradients::zeros_like(model);
            for (std::size_t i = first; i < last; ++i) {
                LossAndGradients lg = loss_and_grad(model, op, dataset[order[i]], ssim_cfg);
                if (!std::isfinite(lg.loss)) {
                    std::ostringstream msg;
                    msg << "non-finite loss at epoch " << epoch + 1 << ", sample " << order[i];
                    throw TrainingError(msg.str());
                }
                loss_sum += lg.loss;
                batch += lg.gradients;
            }
            batch *= 1.0 / static_cast<double>(last - first);
            optimizer.step(model, batch, lr);
        }

        EpochRecord record;
        record.epoch = epoch + 1;
        record.mean_loss = loss_sum / static_cast<double>(dataset.size());
        record.learning_rate = lr;
        record.seconds = std::chrono::duration<double>(clock::now() - start).count();
        report.epochs.push_back(record);
        if (on_epoch) on_epoch(record);
    }
    return report;
}

}  // namespace dubline

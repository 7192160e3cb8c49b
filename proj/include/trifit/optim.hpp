#pragma once

#include <cmath>
#include <cstdint>

#include "trifit/constants.hpp"
#include "trifit/error.hpp"
#include "trifit/net.hpp"

namespace trifit {

struct TrainConfig {
    double lr_max = kLearningRateDefault;
    double lr_min = 0.0;
    double weight_decay = kWeightDecayDefault;
    int epochs = kEpochsDefault;
    double lambda = kContrastiveWeightDefault;
    double tau = kTemperatureDefault;
    int batch_size = kBatchSizeDefault;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const {
        if (epochs < 1) throw Error("epochs must be >= 1");
        if (batch_size < 2) throw Error("batch size must be >= 2");
        if (lr_max <= 0.0 || lr_min < 0.0 || lr_min > lr_max) throw Error("bad learning rates");
        if (tau <= 0.0) throw Error("tau must be positive");
        if (lambda < 0.0) throw Error("lambda must be nonnegative");
        if (weight_decay < 0.0) throw Error("weight decay must be nonnegative");
    }
};

/// Cosine annealing without restarts, stepped per optimizer step:
/// lr(t) = lr_min + (lr_max - lr_min) * (1 + cos(pi t / T)) / 2.
inline double cosine_lr(long step, long total_steps, double lr_max, double lr_min = 0.0) {
    if (step < 0 || step > total_steps) throw Error("cosine_lr step outside [0, T]");
    if (total_steps == 0) return lr_max;
    const double phase = M_PI * static_cast<double>(step) / static_cast<double>(total_steps);
    return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(phase));
}

/// One AdamW update of a single parameter. Decoupled decay:
/// theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta).
/// `step` is 1-based for bias correction; exempt parameters skip the decay.
inline void adamw_update(double& theta, double grad, double& moment1, double& moment2, long step,
                         double lr, double weight_decay, double beta1, double beta2, double eps) {
    moment1 = beta1 * moment1 + (1.0 - beta1) * grad;
    moment2 = beta2 * moment2 + (1.0 - beta2) * grad * grad;
    const double m_hat = moment1 / (1.0 - std::pow(beta1, static_cast<double>(step)));
    const double v_hat = moment2 / (1.0 - std::pow(beta2, static_cast<double>(step)));
    theta -= lr * (m_hat / (std::sqrt(v_hat) + eps) + weight_decay * theta);
}

struct AdamWState {
    FusionModel moment1 = FusionModel::zeros_like();
    FusionModel moment2 = FusionModel::zeros_like();
    long step = 0;  // completed updates
};

/// Full-model AdamW step. LayerNorm scales/shifts and biases are exempt from
/// weight decay.
inline void adamw_step(FusionModel& model, FusionModel& grads, AdamWState& state, double lr,
                       const TrainConfig& config) {
    ++state.step;
    auto params = model.params();
    auto grad_refs = grads.params();
    auto m1_refs = state.moment1.params();
    auto m2_refs = state.moment2.params();
    for (std::size_t p = 0; p < params.size(); ++p) {
        const double decay = params[p].decay_exempt ? 0.0 : config.weight_decay;
        double* theta = params[p].data;
        const double* grad = grad_refs[p].data;
        double* m1 = m1_refs[p].data;
        double* m2 = m2_refs[p].data;
        const Eigen::Index size = params[p].size();
        for (Eigen::Index i = 0; i < size; ++i)
            adamw_update(theta[i], grad[i], m1[i], m2[i], state.step, lr, decay, config.beta1,
                         config.beta2, config.eps);
    }
}

}  // namespace trifit

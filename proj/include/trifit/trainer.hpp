#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "trifit/checkpoint.hpp"
#include "trifit/error.hpp"
#include "trifit/losses.hpp"
#include "trifit/metrics.hpp"
#include "trifit/net.hpp"
#include "trifit/optim.hpp"
#include "trifit/rng.hpp"
#include "trifit/store.hpp"
#include "trifit/variant.hpp"

namespace trifit {

/// Training/eval configurations: modality subsets, the simple-concat routing
/// (no-moe), and contrastive-free training (no-ctr). All run through the same
/// trainer; only input zeroing, routing, and the loss mix change.
enum class Ablation {
    full,
    seq,
    structure,
    dyn,
    seq_struct,
    seq_dyn,
    struct_dyn,
    no_moe,
    no_ctr,
};

struct AblationTraits {
    bool use_seq = true;
    bool use_str = true;
    bool use_dyn = true;
    bool force_trimodal_expert = false;
    bool contrastive = true;
};

inline AblationTraits ablation_traits(Ablation ablation) {
    AblationTraits traits;
    switch (ablation) {
        case Ablation::full: break;
        case Ablation::seq: traits.use_str = traits.use_dyn = false; break;
        case Ablation::structure: traits.use_seq = traits.use_dyn = false; break;
        case Ablation::dyn: traits.use_seq = traits.use_str = false; break;
        case Ablation::seq_struct: traits.use_dyn = false; break;
        case Ablation::seq_dyn: traits.use_str = false; break;
        case Ablation::struct_dyn: traits.use_seq = false; break;
        case Ablation::no_moe: traits.force_trimodal_expert = true; break;
        case Ablation::no_ctr: traits.contrastive = false; break;
    }
    return traits;
}

inline const char* ablation_name(Ablation ablation) {
    switch (ablation) {
        case Ablation::full: return "full";
        case Ablation::seq: return "seq";
        case Ablation::structure: return "struct";
        case Ablation::dyn: return "dyn";
        case Ablation::seq_struct: return "seq+struct";
        case Ablation::seq_dyn: return "seq+dyn";
        case Ablation::struct_dyn: return "struct+dyn";
        case Ablation::no_moe: return "no-moe";
        case Ablation::no_ctr: return "no-ctr";
    }
    return "full";
}

inline Ablation parse_ablation(const std::string& name) {
    if (name == "full") return Ablation::full;
    if (name == "seq") return Ablation::seq;
    if (name == "struct") return Ablation::structure;
    if (name == "dyn") return Ablation::dyn;
    if (name == "seq+struct") return Ablation::seq_struct;
    if (name == "seq+dyn") return Ablation::seq_dyn;
    if (name == "struct+dyn") return Ablation::struct_dyn;
    if (name == "no-moe") return Ablation::no_moe;
    if (name == "no-ctr") return Ablation::no_ctr;
    throw Error("unknown ablation '" + name + "'");
}

/// Labeled variants with their three embeddings, row-aligned.
struct Dataset {
    std::vector<VariantRecord> variants;
    Eigen::MatrixXd seq;  // n x 1280
    Eigen::MatrixXd str;  // n x 512
    Eigen::MatrixXd dyn;  // n x 256
    std::vector<int> labels;

    std::size_t size() const { return variants.size(); }
};

/// Join variants against the three stores. Every variant must have all three
/// embeddings; missing keys are reported together.
inline Dataset assemble_dataset(const std::vector<VariantRecord>& variants,
                                const EmbeddingStore& seq_store, const EmbeddingStore& str_store,
                                const EmbeddingStore& dyn_store) {
    Dataset data;
    data.variants = variants;
    const auto n = static_cast<Eigen::Index>(variants.size());
    data.seq.resize(n, seq_store.dim);
    data.str.resize(n, str_store.dim);
    data.dyn.resize(n, dyn_store.dim);
    data.labels.reserve(variants.size());

    const auto seq_index = seq_store.index();
    const auto str_index = str_store.index();
    const auto dyn_index = dyn_store.index();
    std::vector<std::string> missing;
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& rec = variants[static_cast<std::size_t>(r)];
        EmbeddingKey key{rec.protein_id, static_cast<std::uint32_t>(rec.position),
                         rec.wt.letter(), rec.mut.letter()};
        const std::string tag = rec.protein_id + " " + std::string(1, key.wt) +
                                std::to_string(rec.position) + key.mut;
        const auto fill = [&](const auto& index, Eigen::MatrixXd& dst, const char* what) {
            const auto hit = index.find(key);
            if (hit == index.end()) {
                missing.push_back(std::string(what) + " " + tag);
                return;
            }
            const auto& vec = *hit->second;
            for (std::size_t d = 0; d < vec.size(); ++d)
                dst(r, static_cast<Eigen::Index>(d)) = static_cast<double>(vec[d]);
        };
        fill(seq_index, data.seq, "seq");
        fill(str_index, data.str, "str");
        fill(dyn_index, data.dyn, "dyn");
        if (!rec.label) throw Error("unlabeled variant " + tag + " in dataset");
        data.labels.push_back(*rec.label);
    }
    if (!missing.empty()) {
        std::string message =
            "missing embeddings for " + std::to_string(missing.size()) + " variant(s):";
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i) message += " " + missing[i];
        if (missing.size() > 10) message += " ...";
        throw Error(message);
    }
    return data;
}

struct StepLoss {
    LossBreakdown breakdown;
    FusionModel grads;
    FusionOutput out;
};

/// Forward + both loss terms + full backward for one batch. Inputs must
/// already honor the ablation's modality zeroing; traits control routing and
/// which contrastive pairs are active.
inline StepLoss compute_step(const FusionModel& model, const Eigen::MatrixXd& e_seq,
                             const Eigen::MatrixXd& e_str, const Eigen::MatrixXd& e_dyn,
                             const std::vector<int>& labels, const TrainConfig& config,
                             const AblationTraits& traits, const ForwardOptions& options,
                             bool want_grads = true) {
    ForwardCache cache;
    ForwardOptions opts = options;
    opts.force_trimodal_expert = traits.force_trimodal_expert;
    forward(model, e_seq, e_str, e_dyn, opts, cache);

    StepLoss step;
    step.breakdown.lambda = traits.contrastive ? config.lambda : 0.0;
    step.breakdown.tau = config.tau;
    step.breakdown.ce = cross_entropy(cache.out.logits, labels);

    // contrastive pairs among active modalities
    struct Pair {
        const Eigen::MatrixXd* a;
        const Eigen::MatrixXd* b;
        double* slot;
        Eigen::MatrixXd* d_a;
        Eigen::MatrixXd* d_b;
    };
    Eigen::MatrixXd d_seq, d_str, d_dyn;
    if (want_grads) {
        d_seq = Eigen::MatrixXd::Zero(e_seq.rows(), kFusionDim);
        d_str = Eigen::MatrixXd::Zero(e_seq.rows(), kFusionDim);
        d_dyn = Eigen::MatrixXd::Zero(e_seq.rows(), kFusionDim);
    }
    std::vector<Pair> pairs;
    if (traits.use_seq && traits.use_str)
        pairs.push_back({&cache.out.z_seq, &cache.out.z_str, &step.breakdown.nce_seq_str, &d_seq,
                         &d_str});
    if (traits.use_seq && traits.use_dyn)
        pairs.push_back({&cache.out.z_seq, &cache.out.z_dyn, &step.breakdown.nce_seq_dyn, &d_seq,
                         &d_dyn});
    if (traits.use_str && traits.use_dyn)
        pairs.push_back({&cache.out.z_str, &cache.out.z_dyn, &step.breakdown.nce_str_dyn, &d_str,
                         &d_dyn});

    const double lambda_eff = step.breakdown.lambda;
    const bool ctr_grads = want_grads && lambda_eff > 0.0 && !pairs.empty();
    double pair_sum = 0.0;
    for (auto& pair : pairs) {
        auto nce = info_nce_with_grad(*pair.a, *pair.b, config.tau, ctr_grads);
        *pair.slot = nce.loss;
        pair_sum += nce.loss;
        if (ctr_grads) {
            const double coeff = lambda_eff / static_cast<double>(pairs.size());
            *pair.d_a += coeff * nce.d_z;
            *pair.d_b += coeff * nce.d_z_prime;
        }
    }
    step.breakdown.ctr = pairs.empty() ? 0.0 : pair_sum / static_cast<double>(pairs.size());
    step.breakdown.total = step.breakdown.ce + lambda_eff * step.breakdown.ctr;

    if (want_grads) {
        const Eigen::MatrixXd d_logits = cross_entropy_grad(cache.out.logits, labels);
        step.grads = backward(model, cache, d_logits, ctr_grads ? &d_seq : nullptr,
                              ctr_grads ? &d_str : nullptr, ctr_grads ? &d_dyn : nullptr);
    }
    step.out = std::move(cache.out);
    return step;
}

struct EpochStats {
    int epoch = 0;
    LossBreakdown mean;
    double val_auroc = 0.0;
    double lr_last = 0.0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    int best_epoch = 0;  // maximizes validation AUROC, earliest on ties
};

struct TrainCallbacks {
    std::function<void(int epoch, long step, double lr, const LossBreakdown&)> on_step;
    std::function<void(const EpochStats&)> on_epoch;
};

struct Predictions {
    std::vector<double> p;    // probability of class 1 (functional)
    Eigen::MatrixXd weights;  // n x 4 router weights
};

/// Dropout-off inference: class-1 probability and router weights per row.
inline Predictions predict(const FusionModel& model, const Dataset& data, Ablation ablation,
                           Eigen::Index eval_batch = 512) {
    const AblationTraits traits = ablation_traits(ablation);
    const auto n = static_cast<Eigen::Index>(data.size());
    Predictions pred;
    pred.p.resize(static_cast<std::size_t>(n));
    pred.weights.resize(n, kExpertCount);
    ForwardOptions opts;
    opts.force_trimodal_expert = traits.force_trimodal_expert;
    for (Eigen::Index start = 0; start < n; start += eval_batch) {
        const Eigen::Index count = std::min(eval_batch, n - start);
        Eigen::MatrixXd e_seq = Eigen::MatrixXd::Zero(count, data.seq.cols());
        Eigen::MatrixXd e_str = Eigen::MatrixXd::Zero(count, data.str.cols());
        Eigen::MatrixXd e_dyn = Eigen::MatrixXd::Zero(count, data.dyn.cols());
        if (traits.use_seq) e_seq = data.seq.middleRows(start, count);
        if (traits.use_str) e_str = data.str.middleRows(start, count);
        if (traits.use_dyn) e_dyn = data.dyn.middleRows(start, count);
        const FusionOutput out = forward(model, e_seq, e_str, e_dyn, opts);
        for (Eigen::Index r = 0; r < count; ++r) {
            const double l0 = out.logits(r, 0), l1 = out.logits(r, 1);
            const double max = std::max(l0, l1);
            const double z0 = std::exp(l0 - max), z1 = std::exp(l1 - max);
            pred.p[static_cast<std::size_t>(start + r)] = z1 / (z0 + z1);
        }
        pred.weights.middleRows(start, count) = out.weights;
    }
    return pred;
}

struct TrainResult {
    Checkpoint checkpoint;  // best-validation model and optimizer state
    TrainHistory history;
};

/// The full optimization loop: seeded shuffling, per-step cosine annealing,
/// AdamW, per-epoch validation AUROC, best-epoch checkpointing.
inline TrainResult train(const Dataset& train_data, const Dataset& val_data,
                         const TrainConfig& config, Ablation ablation = Ablation::full,
                         const TrainCallbacks& callbacks = {}) {
    config.validate();
    if (train_data.size() < 2) throw Error("training set too small");
    if (val_data.size() < 1) throw Error("validation set empty");
    const AblationTraits traits = ablation_traits(ablation);

    FusionModel model = FusionModel::init(config.seed);
    AdamWState opt_state;
    const auto n = static_cast<long>(train_data.size());
    const long steps_per_epoch = (n + config.batch_size - 1) / config.batch_size;
    const long total_steps = steps_per_epoch * config.epochs;

    TrainResult result;
    result.history.best_epoch = 0;
    double best_auroc = -1.0;
    long global_step = 0;

    std::vector<std::size_t> order(train_data.size());
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        Rng shuffle_rng(mix_seed(config.seed, 0x5f5fULL, static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        LossBreakdown sum;
        double lr_last = 0.0;
        for (long b = 0; b < steps_per_epoch; ++b) {
            const auto start = static_cast<std::size_t>(b) * static_cast<std::size_t>(config.batch_size);
            const auto count = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size),
                                                     train_data.size() - start);
            const auto rows = static_cast<Eigen::Index>(count);
            Eigen::MatrixXd e_seq = Eigen::MatrixXd::Zero(rows, train_data.seq.cols());
            Eigen::MatrixXd e_str = Eigen::MatrixXd::Zero(rows, train_data.str.cols());
            Eigen::MatrixXd e_dyn = Eigen::MatrixXd::Zero(rows, train_data.dyn.cols());
            std::vector<int> labels(count);
            for (std::size_t r = 0; r < count; ++r) {
                const auto src = static_cast<Eigen::Index>(order[start + r]);
                if (traits.use_seq) e_seq.row(static_cast<Eigen::Index>(r)) = train_data.seq.row(src);
                if (traits.use_str) e_str.row(static_cast<Eigen::Index>(r)) = train_data.str.row(src);
                if (traits.use_dyn) e_dyn.row(static_cast<Eigen::Index>(r)) = train_data.dyn.row(src);
                labels[r] = train_data.labels[order[start + r]];
            }

            ForwardOptions options;
            options.training = true;
            options.dropout_seed =
                mix_seed(config.seed, static_cast<std::uint64_t>(epoch) << 32 |
                                          static_cast<std::uint64_t>(b),
                         0xd20ULL);
            StepLoss step =
                compute_step(model, e_seq, e_str, e_dyn, labels, config, traits, options);
            if (!std::isfinite(step.breakdown.total))
                throw Error("non-finite loss at epoch " + std::to_string(epoch) + " step " +
                            std::to_string(b));

            const double lr = cosine_lr(global_step, total_steps, config.lr_max, config.lr_min);
            lr_last = lr;
            adamw_step(model, step.grads, opt_state, lr, config);
            if (callbacks.on_step) callbacks.on_step(epoch, global_step, lr, step.breakdown);

            sum.ce += step.breakdown.ce;
            sum.nce_seq_str += step.breakdown.nce_seq_str;
            sum.nce_seq_dyn += step.breakdown.nce_seq_dyn;
            sum.nce_str_dyn += step.breakdown.nce_str_dyn;
            sum.ctr += step.breakdown.ctr;
            sum.total += step.breakdown.total;
            ++global_step;
        }

        EpochStats stats;
        stats.epoch = epoch;
        const auto steps = static_cast<double>(steps_per_epoch);
        stats.mean.ce = sum.ce / steps;
        stats.mean.nce_seq_str = sum.nce_seq_str / steps;
        stats.mean.nce_seq_dyn = sum.nce_seq_dyn / steps;
        stats.mean.nce_str_dyn = sum.nce_str_dyn / steps;
        stats.mean.ctr = sum.ctr / steps;
        stats.mean.total = sum.total / steps;
        stats.mean.lambda = traits.contrastive ? config.lambda : 0.0;
        stats.mean.tau = config.tau;
        stats.lr_last = lr_last;

        const Predictions val_pred = predict(model, val_data, ablation);
        stats.val_auroc = auroc(val_pred.p, val_data.labels);
        result.history.epochs.push_back(stats);
        if (callbacks.on_epoch) callbacks.on_epoch(stats);

        if (stats.val_auroc > best_auroc) {
            best_auroc = stats.val_auroc;
            result.history.best_epoch = epoch;
            result.checkpoint.seed = config.seed;
            result.checkpoint.model = model;
            TrainState state;
            state.adamw = opt_state;
            state.epoch = static_cast<std::uint32_t>(epoch);
            result.checkpoint.train_state = std::move(state);
        }
    }
    return result;
}

}  // namespace trifit

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "trifit/constants.hpp"
#include "trifit/error.hpp"
#include "trifit/rng.hpp"

namespace trifit {

// Batch convention: matrices are batch-major, one sample per row.

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

inline double gelu_grad(double x) {
    const double cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
    const double pdf = std::exp(-0.5 * x * x) * 0.3989422804014326779399461;  // 1/sqrt(2*pi)
    return cdf + x * pdf;
}

inline Eigen::MatrixXd gelu(const Eigen::MatrixXd& x) {
    return x.unaryExpr([](double v) { return gelu(v); });
}

struct Affine {
    Eigen::MatrixXd weight;  // in x out
    Eigen::VectorXd bias;    // out

    void resize(int in, int out) {
        weight = Eigen::MatrixXd::Zero(in, out);
        bias = Eigen::VectorXd::Zero(out);
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
        if (x.cols() != weight.rows())
            throw Error("affine input dim " + std::to_string(x.cols()) + ", expected " +
                        std::to_string(weight.rows()));
        Eigen::MatrixXd y;
        y.noalias() = x * weight;
        y.rowwise() += bias.transpose();
        return y;
    }
};

struct LayerNormParams {
    Eigen::VectorXd scale;  // gamma, init 1
    Eigen::VectorXd shift;  // beta, init 0

    void resize(int dim) {
        scale = Eigen::VectorXd::Ones(dim);
        shift = Eigen::VectorXd::Zero(dim);
    }
};

struct ProjectionHead {
    Affine linear;
    LayerNormParams norm;
};

struct Expert {
    Affine hidden;  // in -> kExpertHiddenDim, GELU
    Affine output;  // kExpertHiddenDim -> kFusionDim
};

struct Router {
    Affine hidden;  // 3*kFusionDim -> kRouterHiddenDim, GELU
    Affine output;  // kRouterHiddenDim -> kExpertCount, softmax
};

struct Classifier {
    Affine hidden;  // kFusionDim -> kClassifierHiddenDim, GELU, dropout
    Affine output;  // kClassifierHiddenDim -> kClassCount
};

constexpr std::int64_t affine_param_count(std::int64_t in, std::int64_t out) {
    return in * out + out;
}

/// Trainable parameter count implied by the layer shapes, kept as a golden
/// constant and asserted against the live model.
constexpr std::int64_t fusion_param_count() {
    std::int64_t total = 0;
    total += affine_param_count(kSeqEmbedDim, kFusionDim) + 2 * kFusionDim;
    total += affine_param_count(kStructEmbedDim, kFusionDim) + 2 * kFusionDim;
    total += affine_param_count(kDynEmbedDim, kFusionDim) + 2 * kFusionDim;
    total += 3 * (affine_param_count(2 * kFusionDim, kExpertHiddenDim) +
                  affine_param_count(kExpertHiddenDim, kFusionDim));
    total += affine_param_count(3 * kFusionDim, kExpertHiddenDim) +
             affine_param_count(kExpertHiddenDim, kFusionDim);
    total += affine_param_count(3 * kFusionDim, kRouterHiddenDim) +
             affine_param_count(kRouterHiddenDim, kExpertCount);
    total += affine_param_count(kFusionDim, kClassifierHiddenDim) +
             affine_param_count(kClassifierHiddenDim, kClassCount);
    return total;
}

inline constexpr std::int64_t kFusionParamCount = 4695622;
static_assert(fusion_param_count() == kFusionParamCount);

/// A named view over one parameter tensor. Biases and LayerNorm parameters
/// are exempt from weight decay.
struct ParamRef {
    std::string name;
    double* data;
    Eigen::Index rows;
    Eigen::Index cols;  // 1 for vectors
    bool decay_exempt;

    Eigen::Index size() const { return rows * cols; }
};

struct FusionModel {
    ProjectionHead proj_seq, proj_str, proj_dyn;
    std::array<Expert, kExpertCount> experts;  // E1: seq+str, E2: seq+dyn, E3: str+dyn, E4: all
    Router router;
    Classifier classifier;

    static FusionModel zeros() {
        FusionModel model;
        model.proj_seq.linear.resize(kSeqEmbedDim, kFusionDim);
        model.proj_seq.norm.resize(kFusionDim);
        model.proj_str.linear.resize(kStructEmbedDim, kFusionDim);
        model.proj_str.norm.resize(kFusionDim);
        model.proj_dyn.linear.resize(kDynEmbedDim, kFusionDim);
        model.proj_dyn.norm.resize(kFusionDim);
        model.experts[0].hidden.resize(2 * kFusionDim, kExpertHiddenDim);
        model.experts[1].hidden.resize(2 * kFusionDim, kExpertHiddenDim);
        model.experts[2].hidden.resize(2 * kFusionDim, kExpertHiddenDim);
        model.experts[3].hidden.resize(3 * kFusionDim, kExpertHiddenDim);
        for (auto& expert : model.experts) expert.output.resize(kExpertHiddenDim, kFusionDim);
        model.router.hidden.resize(3 * kFusionDim, kRouterHiddenDim);
        model.router.output.resize(kRouterHiddenDim, kExpertCount);
        model.classifier.hidden.resize(kFusionDim, kClassifierHiddenDim);
        model.classifier.output.resize(kClassifierHiddenDim, kClassCount);
        // zeros() leaves LayerNorm scale at 1; grad buffers want true zeros
        return model;
    }

    /// Gradient/moment buffer with the same shapes, all entries zero.
    static FusionModel zeros_like() {
        FusionModel model = zeros();
        model.proj_seq.norm.scale.setZero();
        model.proj_str.norm.scale.setZero();
        model.proj_dyn.norm.scale.setZero();
        return model;
    }

    /// Seeded init: weights uniform on +-sqrt(6/(fan_in+fan_out)), biases 0,
    /// LayerNorm scale 1 / shift 0.
    static FusionModel init(std::uint64_t seed) {
        FusionModel model = zeros();
        Rng rng(mix_seed(seed, 0x1217ULL));
        for (auto& ref : model.params()) {
            if (ref.cols == 1) continue;  // biases / norm params keep their init
            const double bound =
                std::sqrt(6.0 / static_cast<double>(ref.rows + ref.cols));
            // fill in row-major order for a reproducible stream
            Eigen::Map<Eigen::MatrixXd> view(ref.data, ref.rows, ref.cols);
            for (Eigen::Index r = 0; r < ref.rows; ++r)
                for (Eigen::Index c = 0; c < ref.cols; ++c)
                    view(r, c) = rng.uniform(-bound, bound);
        }
        return model;
    }

    std::vector<ParamRef> params() {
        std::vector<ParamRef> refs;
        auto add_affine = [&refs](const std::string& name, Affine& affine) {
            refs.push_back({name + ".weight", affine.weight.data(), affine.weight.rows(),
                            affine.weight.cols(), false});
            refs.push_back({name + ".bias", affine.bias.data(), affine.bias.size(), 1, true});
        };
        auto add_head = [&refs, &add_affine](const std::string& name, ProjectionHead& head) {
            add_affine(name + ".linear", head.linear);
            refs.push_back({name + ".norm.scale", head.norm.scale.data(), head.norm.scale.size(),
                            1, true});
            refs.push_back({name + ".norm.shift", head.norm.shift.data(), head.norm.shift.size(),
                            1, true});
        };
        add_head("proj_seq", proj_seq);
        add_head("proj_str", proj_str);
        add_head("proj_dyn", proj_dyn);
        for (int i = 0; i < kExpertCount; ++i) {
            const std::string name = "expert" + std::to_string(i + 1);
            add_affine(name + ".hidden", experts[static_cast<std::size_t>(i)].hidden);
            add_affine(name + ".output", experts[static_cast<std::size_t>(i)].output);
        }
        add_affine("router.hidden", router.hidden);
        add_affine("router.output", router.output);
        add_affine("classifier.hidden", classifier.hidden);
        add_affine("classifier.output", classifier.output);
        return refs;
    }

    /// Read-only traversal; the views alias this object, do not write through
    /// them.
    std::vector<ParamRef> params() const {
        return const_cast<FusionModel*>(this)->params();
    }

    std::int64_t param_count() const {
        std::int64_t total = 0;
        for (const auto& ref : params()) total += ref.size();
        return total;
    }
};

struct ForwardOptions {
    bool training = false;
    std::uint64_t dropout_seed = 0;
    /// Route everything to the trimodal expert with frozen router
    /// (the no-MoE / simple-concat configuration).
    bool force_trimodal_expert = false;
};

struct FusionOutput {
    Eigen::MatrixXd z_seq, z_str, z_dyn;             // B x 512
    std::array<Eigen::MatrixXd, kExpertCount> expert_out;  // B x 512 each
    Eigen::MatrixXd weights;                         // B x 4, rows sum to 1
    Eigen::MatrixXd fused;                           // B x 512
    Eigen::MatrixXd logits;                          // B x 2
};

namespace detail {

struct ProjCache {
    Eigen::MatrixXd input;   // B x d_in
    Eigen::MatrixXd normed;  // B x 512, (pre - mean) * rstd
    Eigen::VectorXd rstd;    // B
    Eigen::MatrixXd ln_out;  // B x 512, scale * normed + shift
};

struct MlpCache {
    Eigen::MatrixXd input;       // B x in
    Eigen::MatrixXd hidden_pre;  // B x hidden
    Eigen::MatrixXd hidden_act;  // B x hidden
};

inline constexpr double kLayerNormEps = 1e-5;

inline Eigen::MatrixXd project_forward(const ProjectionHead& head, const Eigen::MatrixXd& input,
                                       ProjCache* cache) {
    const Eigen::MatrixXd pre = head.linear.apply(input);
    const Eigen::Index batch = pre.rows(), dim = pre.cols();
    Eigen::MatrixXd normed(batch, dim);
    Eigen::VectorXd rstd(batch);
    for (Eigen::Index r = 0; r < batch; ++r) {
        const double mean = pre.row(r).mean();
        const double var = (pre.row(r).array() - mean).square().sum() / static_cast<double>(dim);
        const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
        rstd(r) = inv;
        normed.row(r) = (pre.row(r).array() - mean) * inv;
    }
    Eigen::MatrixXd ln_out =
        (normed.array().rowwise() * head.norm.scale.transpose().array()).rowwise() +
        head.norm.shift.transpose().array();
    Eigen::MatrixXd z = gelu(ln_out);
    if (cache) {
        cache->input = input;
        cache->normed = std::move(normed);
        cache->rstd = std::move(rstd);
        cache->ln_out = std::move(ln_out);
    }
    return z;
}

/// dz -> parameter grads; returns nothing for the input side (embeddings are
/// fixed data, so input gradients are never needed upstream of a head).
inline void project_backward(const ProjectionHead& head, const ProjCache& cache,
                             const Eigen::MatrixXd& dz, ProjectionHead& grad) {
    const Eigen::MatrixXd d_ln_out =
        dz.array() * cache.ln_out.unaryExpr([](double v) { return gelu_grad(v); }).array();
    grad.norm.scale.noalias() += (d_ln_out.array() * cache.normed.array()).colwise().sum().matrix();
    grad.norm.shift.noalias() += d_ln_out.colwise().sum();

    const Eigen::MatrixXd d_normed =
        d_ln_out.array().rowwise() * head.norm.scale.transpose().array();
    const Eigen::Index dim = d_normed.cols();
    Eigen::MatrixXd d_pre(d_normed.rows(), dim);
    for (Eigen::Index r = 0; r < d_normed.rows(); ++r) {
        const double mean_d = d_normed.row(r).mean();
        const double mean_dx =
            (d_normed.row(r).array() * cache.normed.row(r).array()).sum() /
            static_cast<double>(dim);
        d_pre.row(r) = cache.rstd(r) * (d_normed.row(r).array() - mean_d -
                                        cache.normed.row(r).array() * mean_dx);
    }
    grad.linear.weight.noalias() += cache.input.transpose() * d_pre;
    grad.linear.bias.noalias() += d_pre.colwise().sum();
}

inline Eigen::MatrixXd mlp_forward(const Affine& hidden, const Affine& output,
                                   const Eigen::MatrixXd& input, MlpCache* cache) {
    Eigen::MatrixXd hidden_pre = hidden.apply(input);
    Eigen::MatrixXd hidden_act = gelu(hidden_pre);
    Eigen::MatrixXd out = output.apply(hidden_act);
    if (cache) {
        cache->input = input;
        cache->hidden_pre = std::move(hidden_pre);
        cache->hidden_act = std::move(hidden_act);
    }
    return out;
}

/// Returns the gradient w.r.t. the MLP input.
inline Eigen::MatrixXd mlp_backward(const Affine& hidden, const Affine& output,
                                    const MlpCache& cache, const Eigen::MatrixXd& d_out,
                                    Affine& hidden_grad, Affine& output_grad) {
    output_grad.weight.noalias() += cache.hidden_act.transpose() * d_out;
    output_grad.bias.noalias() += d_out.colwise().sum();
    Eigen::MatrixXd d_hidden_act;
    d_hidden_act.noalias() = d_out * output.weight.transpose();
    const Eigen::MatrixXd d_hidden_pre =
        d_hidden_act.array() *
        cache.hidden_pre.unaryExpr([](double v) { return gelu_grad(v); }).array();
    hidden_grad.weight.noalias() += cache.input.transpose() * d_hidden_pre;
    hidden_grad.bias.noalias() += d_hidden_pre.colwise().sum();
    Eigen::MatrixXd d_input;
    d_input.noalias() = d_hidden_pre * hidden.weight.transpose();
    return d_input;
}

inline Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd probs(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double max = logits.row(r).maxCoeff();
        const Eigen::ArrayXd shifted = (logits.row(r).array() - max).exp();
        probs.row(r) = shifted / shifted.sum();
    }
    return probs;
}

}  // namespace detail

struct ForwardCache {
    ForwardOptions options;
    detail::ProjCache proj_seq, proj_str, proj_dyn;
    std::array<detail::MlpCache, kExpertCount> experts;
    detail::MlpCache router;
    detail::MlpCache classifier;
    Eigen::MatrixXd dropout_mask;  // B x hidden, entries 0 or 1/keep
    Eigen::MatrixXd dropped;       // hidden_act after mask
    FusionOutput out;
};

/// Full forward pass. Checks the router contract (nonnegative weights, rows
/// summing to 1 within 1e-9) on every call.
inline void forward(const FusionModel& model, const Eigen::MatrixXd& e_seq,
                    const Eigen::MatrixXd& e_str, const Eigen::MatrixXd& e_dyn,
                    const ForwardOptions& options, ForwardCache& cache) {
    const Eigen::Index batch = e_seq.rows();
    if (e_str.rows() != batch || e_dyn.rows() != batch)
        throw Error("batch size mismatch across modalities");
    cache.options = options;

    FusionOutput& out = cache.out;
    out.z_seq = detail::project_forward(model.proj_seq, e_seq, &cache.proj_seq);
    out.z_str = detail::project_forward(model.proj_str, e_str, &cache.proj_str);
    out.z_dyn = detail::project_forward(model.proj_dyn, e_dyn, &cache.proj_dyn);

    Eigen::MatrixXd cat_all(batch, 3 * kFusionDim);
    cat_all << out.z_seq, out.z_str, out.z_dyn;
    Eigen::MatrixXd cat_seq_str(batch, 2 * kFusionDim);
    cat_seq_str << out.z_seq, out.z_str;
    Eigen::MatrixXd cat_seq_dyn(batch, 2 * kFusionDim);
    cat_seq_dyn << out.z_seq, out.z_dyn;
    Eigen::MatrixXd cat_str_dyn(batch, 2 * kFusionDim);
    cat_str_dyn << out.z_str, out.z_dyn;

    out.expert_out[0] = detail::mlp_forward(model.experts[0].hidden, model.experts[0].output,
                                            cat_seq_str, &cache.experts[0]);
    out.expert_out[1] = detail::mlp_forward(model.experts[1].hidden, model.experts[1].output,
                                            cat_seq_dyn, &cache.experts[1]);
    out.expert_out[2] = detail::mlp_forward(model.experts[2].hidden, model.experts[2].output,
                                            cat_str_dyn, &cache.experts[2]);
    out.expert_out[3] = detail::mlp_forward(model.experts[3].hidden, model.experts[3].output,
                                            cat_all, &cache.experts[3]);

    if (options.force_trimodal_expert) {
        out.weights = Eigen::MatrixXd::Zero(batch, kExpertCount);
        out.weights.col(kExpertCount - 1).setOnes();
    } else {
        const Eigen::MatrixXd router_logits = detail::mlp_forward(
            model.router.hidden, model.router.output, cat_all, &cache.router);
        out.weights = detail::softmax_rows(router_logits);
    }

    for (Eigen::Index r = 0; r < batch; ++r) {
        const double row_sum = out.weights.row(r).sum();
        if (out.weights.row(r).minCoeff() < 0.0 || std::abs(row_sum - 1.0) > 1e-9)
            throw Error("router weight row violates the simplex contract");
    }

    out.fused = Eigen::MatrixXd::Zero(batch, kFusionDim);
    for (int k = 0; k < kExpertCount; ++k)
        out.fused.array() +=
            out.expert_out[static_cast<std::size_t>(k)].array().colwise() *
            out.weights.col(k).array();

    // classifier with inverted dropout between GELU and the output layer
    cache.classifier.input = out.fused;
    cache.classifier.hidden_pre = model.classifier.hidden.apply(out.fused);
    cache.classifier.hidden_act = gelu(cache.classifier.hidden_pre);
    const double keep = 1.0 - kDropoutRate;
    if (options.training) {
        cache.dropout_mask.resize(batch, cache.classifier.hidden_act.cols());
        Rng rng(options.dropout_seed);
        for (Eigen::Index r = 0; r < batch; ++r)
            for (Eigen::Index c = 0; c < cache.classifier.hidden_act.cols(); ++c)
                cache.dropout_mask(r, c) = rng.next_double() < keep ? 1.0 / keep : 0.0;
        cache.dropped = cache.classifier.hidden_act.array() * cache.dropout_mask.array();
    } else {
        cache.dropped = cache.classifier.hidden_act;
    }
    out.logits = model.classifier.output.apply(cache.dropped);
}

inline FusionOutput forward(const FusionModel& model, const Eigen::MatrixXd& e_seq,
                            const Eigen::MatrixXd& e_str, const Eigen::MatrixXd& e_dyn,
                            const ForwardOptions& options = {}) {
    ForwardCache cache;
    forward(model, e_seq, e_str, e_dyn, options, cache);
    return cache.out;
}

/// Reverse pass for the whole network. d_logits is the loss gradient at the
/// classifier output; the optional d_z_* terms are extra loss gradients
/// arriving directly at the projected embeddings (the contrastive term).
inline FusionModel backward(const FusionModel& model, const ForwardCache& cache,
                            const Eigen::MatrixXd& d_logits, const Eigen::MatrixXd* d_z_seq_extra,
                            const Eigen::MatrixXd* d_z_str_extra,
                            const Eigen::MatrixXd* d_z_dyn_extra) {
    FusionModel grad = FusionModel::zeros_like();
    const FusionOutput& out = cache.out;
    const Eigen::Index batch = d_logits.rows();

    // classifier
    grad.classifier.output.weight.noalias() += cache.dropped.transpose() * d_logits;
    grad.classifier.output.bias.noalias() += d_logits.colwise().sum();
    Eigen::MatrixXd d_dropped;
    d_dropped.noalias() = d_logits * model.classifier.output.weight.transpose();
    Eigen::MatrixXd d_hidden_act = cache.options.training
                                       ? (d_dropped.array() * cache.dropout_mask.array()).matrix()
                                       : std::move(d_dropped);
    const Eigen::MatrixXd d_hidden_pre =
        d_hidden_act.array() *
        cache.classifier.hidden_pre.unaryExpr([](double v) { return gelu_grad(v); }).array();
    grad.classifier.hidden.weight.noalias() += out.fused.transpose() * d_hidden_pre;
    grad.classifier.hidden.bias.noalias() += d_hidden_pre.colwise().sum();
    Eigen::MatrixXd d_fused;
    d_fused.noalias() = d_hidden_pre * model.classifier.hidden.weight.transpose();

    // weighted expert sum
    Eigen::MatrixXd d_weights(batch, kExpertCount);
    std::array<Eigen::MatrixXd, kExpertCount> d_expert;
    for (int k = 0; k < kExpertCount; ++k) {
        const auto& f_k = out.expert_out[static_cast<std::size_t>(k)];
        d_expert[static_cast<std::size_t>(k)] =
            d_fused.array().colwise() * out.weights.col(k).array();
        d_weights.col(k) = (d_fused.array() * f_k.array()).rowwise().sum();
    }

    Eigen::MatrixXd d_z_seq = Eigen::MatrixXd::Zero(batch, kFusionDim);
    Eigen::MatrixXd d_z_str = Eigen::MatrixXd::Zero(batch, kFusionDim);
    Eigen::MatrixXd d_z_dyn = Eigen::MatrixXd::Zero(batch, kFusionDim);

    // router (softmax + MLP); frozen in the forced-expert configuration
    if (!cache.options.force_trimodal_expert) {
        Eigen::MatrixXd d_router_logits(batch, kExpertCount);
        for (Eigen::Index r = 0; r < batch; ++r) {
            const double inner = d_weights.row(r).dot(out.weights.row(r));
            d_router_logits.row(r) =
                out.weights.row(r).array() * (d_weights.row(r).array() - inner);
        }
        const Eigen::MatrixXd d_cat = detail::mlp_backward(
            model.router.hidden, model.router.output, cache.router, d_router_logits,
            grad.router.hidden, grad.router.output);
        d_z_seq += d_cat.leftCols(kFusionDim);
        d_z_str += d_cat.middleCols(kFusionDim, kFusionDim);
        d_z_dyn += d_cat.rightCols(kFusionDim);
    }

    // experts
    {
        const Eigen::MatrixXd d_cat = detail::mlp_backward(
            model.experts[0].hidden, model.experts[0].output, cache.experts[0], d_expert[0],
            grad.experts[0].hidden, grad.experts[0].output);
        d_z_seq += d_cat.leftCols(kFusionDim);
        d_z_str += d_cat.rightCols(kFusionDim);
    }
    {
        const Eigen::MatrixXd d_cat = detail::mlp_backward(
            model.experts[1].hidden, model.experts[1].output, cache.experts[1], d_expert[1],
            grad.experts[1].hidden, grad.experts[1].output);
        d_z_seq += d_cat.leftCols(kFusionDim);
        d_z_dyn += d_cat.rightCols(kFusionDim);
    }
    {
        const Eigen::MatrixXd d_cat = detail::mlp_backward(
            model.experts[2].hidden, model.experts[2].output, cache.experts[2], d_expert[2],
            grad.experts[2].hidden, grad.experts[2].output);
        d_z_str += d_cat.leftCols(kFusionDim);
        d_z_dyn += d_cat.rightCols(kFusionDim);
    }
    {
        const Eigen::MatrixXd d_cat = detail::mlp_backward(
            model.experts[3].hidden, model.experts[3].output, cache.experts[3], d_expert[3],
            grad.experts[3].hidden, grad.experts[3].output);
        d_z_seq += d_cat.leftCols(kFusionDim);
        d_z_str += d_cat.middleCols(kFusionDim, kFusionDim);
        d_z_dyn += d_cat.rightCols(kFusionDim);
    }

    if (d_z_seq_extra) d_z_seq += *d_z_seq_extra;
    if (d_z_str_extra) d_z_str += *d_z_str_extra;
    if (d_z_dyn_extra) d_z_dyn += *d_z_dyn_extra;

    detail::project_backward(model.proj_seq, cache.proj_seq, d_z_seq, grad.proj_seq);
    detail::project_backward(model.proj_str, cache.proj_str, d_z_str, grad.proj_str);
    detail::project_backward(model.proj_dyn, cache.proj_dyn, d_z_dyn, grad.proj_dyn);
    return grad;
}

/// Standalone head application (z = GELU(LayerNorm(Ax + b))).
inline Eigen::MatrixXd project(const ProjectionHead& head, const Eigen::MatrixXd& input) {
    detail::ProjCache cache;
    return detail::project_forward(head, input, &cache);
}

/// Classifier alone, for callers that already hold a fused representation.
inline Eigen::MatrixXd classify(const FusionModel& model, const Eigen::MatrixXd& fused,
                                bool training_mode, std::uint64_t dropout_seed) {
    const Eigen::MatrixXd hidden_pre = model.classifier.hidden.apply(fused);
    Eigen::MatrixXd hidden_act = gelu(hidden_pre);
    if (training_mode) {
        const double keep = 1.0 - kDropoutRate;
        Rng rng(dropout_seed);
        for (Eigen::Index r = 0; r < hidden_act.rows(); ++r)
            for (Eigen::Index c = 0; c < hidden_act.cols(); ++c)
                hidden_act(r, c) *= rng.next_double() < keep ? 1.0 / keep : 0.0;
    }
    return model.classifier.output.apply(hidden_act);
}

}  // namespace trifit

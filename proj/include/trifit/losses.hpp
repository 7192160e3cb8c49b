#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "trifit/constants.hpp"
#include "trifit/error.hpp"

namespace trifit {

/// Per-step loss decomposition; total = ce + lambda * ctr, ctr = mean of the
/// contrastive pair losses.
struct LossBreakdown {
    double ce = 0.0;
    double nce_seq_str = 0.0;
    double nce_seq_dyn = 0.0;
    double nce_str_dyn = 0.0;
    double ctr = 0.0;
    double total = 0.0;
    double lambda = kContrastiveWeightDefault;
    double tau = kTemperatureDefault;
};

namespace detail {

inline double logsumexp(const Eigen::VectorXd& values) {
    const double max = values.maxCoeff();
    return max + std::log((values.array() - max).exp().sum());
}

inline Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& z, Eigen::VectorXd* norms) {
    Eigen::MatrixXd unit(z.rows(), z.cols());
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const double norm = z.row(r).norm();
        if (norm < 1e-12) throw Error("zero-norm row " + std::to_string(r) + " in InfoNCE input");
        unit.row(r) = z.row(r) / norm;
        if (norms) (*norms)(r) = norm;
    }
    return unit;
}

}  // namespace detail

struct InfoNceResult {
    double loss = 0.0;
    Eigen::MatrixXd d_z;        // gradient w.r.t. the first argument
    Eigen::MatrixXd d_z_prime;  // gradient w.r.t. the second argument
};

/// Symmetric InfoNCE over one modality pair with cosine similarity: the mean
/// over the batch of both softmax directions, each contrasting the matched
/// pair against all in-batch rows.
inline InfoNceResult info_nce_with_grad(const Eigen::MatrixXd& z, const Eigen::MatrixXd& z_prime,
                                        double tau = kTemperatureDefault,
                                        bool want_grad = true) {
    const Eigen::Index batch = z.rows();
    if (batch < 2) throw Error("InfoNCE needs a batch of at least 2");
    if (z_prime.rows() != batch || z_prime.cols() != z.cols())
        throw Error("InfoNCE input shapes differ");

    Eigen::VectorXd norms_a(batch), norms_b(batch);
    const Eigen::MatrixXd unit_a = detail::normalize_rows(z, &norms_a);
    const Eigen::MatrixXd unit_b = detail::normalize_rows(z_prime, &norms_b);
    Eigen::MatrixXd sims;
    sims.noalias() = unit_a * unit_b.transpose();
    const Eigen::MatrixXd scaled = sims / tau;

    double total = 0.0;
    for (Eigen::Index i = 0; i < batch; ++i) {
        const double row_lse = detail::logsumexp(scaled.row(i).transpose());
        const double col_lse = detail::logsumexp(scaled.col(i));
        total += (row_lse - scaled(i, i)) + (col_lse - scaled(i, i));
    }
    InfoNceResult result;
    result.loss = total / (2.0 * static_cast<double>(batch));
    if (!want_grad) return result;

    // d loss / d scaled = ((row_softmax - I) + (col_softmax - I)) / 2B
    Eigen::MatrixXd d_scaled(batch, batch);
    for (Eigen::Index i = 0; i < batch; ++i) {
        const double row_max = scaled.row(i).maxCoeff();
        const Eigen::ArrayXd row_exp = (scaled.row(i).array() - row_max).exp();
        d_scaled.row(i) = row_exp / row_exp.sum();
    }
    for (Eigen::Index j = 0; j < batch; ++j) {
        const double col_max = scaled.col(j).maxCoeff();
        const Eigen::ArrayXd col_exp = (scaled.col(j).array() - col_max).exp();
        d_scaled.col(j) += (col_exp / col_exp.sum()).matrix();
    }
    d_scaled.diagonal().array() -= 2.0;
    d_scaled /= 2.0 * static_cast<double>(batch);

    const Eigen::MatrixXd d_sims = d_scaled / tau;
    Eigen::MatrixXd d_unit_a;
    d_unit_a.noalias() = d_sims * unit_b;
    Eigen::MatrixXd d_unit_b;
    d_unit_b.noalias() = d_sims.transpose() * unit_a;

    // through row normalization: dz = (du - n (n . du)) / |z|
    result.d_z.resize(batch, z.cols());
    result.d_z_prime.resize(batch, z.cols());
    for (Eigen::Index r = 0; r < batch; ++r) {
        const double inner_a = unit_a.row(r).dot(d_unit_a.row(r));
        result.d_z.row(r) = (d_unit_a.row(r) - inner_a * unit_a.row(r)) / norms_a(r);
        const double inner_b = unit_b.row(r).dot(d_unit_b.row(r));
        result.d_z_prime.row(r) = (d_unit_b.row(r) - inner_b * unit_b.row(r)) / norms_b(r);
    }
    return result;
}

inline double info_nce(const Eigen::MatrixXd& z, const Eigen::MatrixXd& z_prime,
                       double tau = kTemperatureDefault) {
    return info_nce_with_grad(z, z_prime, tau, false).loss;
}

struct TrimodalContrastive {
    double ctr = 0.0;
    double seq_str = 0.0;
    double seq_dyn = 0.0;
    double str_dyn = 0.0;
};

/// ctr = mean of the three pairwise losses.
inline TrimodalContrastive trimodal_contrastive(const Eigen::MatrixXd& z_seq,
                                                const Eigen::MatrixXd& z_str,
                                                const Eigen::MatrixXd& z_dyn,
                                                double tau = kTemperatureDefault) {
    TrimodalContrastive result;
    result.seq_str = info_nce(z_seq, z_str, tau);
    result.seq_dyn = info_nce(z_seq, z_dyn, tau);
    result.str_dyn = info_nce(z_str, z_dyn, tau);
    result.ctr = (result.seq_str + result.seq_dyn + result.str_dyn) / 3.0;
    return result;
}

/// Mean over the batch of -log softmax(logits)[label], log-sum-exp stabilized.
inline double cross_entropy(const Eigen::MatrixXd& logits, const std::vector<int>& labels) {
    const Eigen::Index batch = logits.rows();
    if (static_cast<Eigen::Index>(labels.size()) != batch)
        throw Error("label count does not match batch");
    double total = 0.0;
    for (Eigen::Index r = 0; r < batch; ++r) {
        const int label = labels[static_cast<std::size_t>(r)];
        if (label != 0 && label != 1) throw Error("labels must be 0 or 1");
        const double max = logits.row(r).maxCoeff();
        const double lse = max + std::log((logits.row(r).array() - max).exp().sum());
        total += lse - logits(r, label);
    }
    return total / static_cast<double>(batch);
}

/// d cross_entropy / d logits = (softmax - onehot) / B.
inline Eigen::MatrixXd cross_entropy_grad(const Eigen::MatrixXd& logits,
                                          const std::vector<int>& labels) {
    const Eigen::Index batch = logits.rows();
    Eigen::MatrixXd grad(batch, logits.cols());
    for (Eigen::Index r = 0; r < batch; ++r) {
        const double max = logits.row(r).maxCoeff();
        const Eigen::ArrayXd shifted = (logits.row(r).array() - max).exp();
        grad.row(r) = shifted / shifted.sum();
        grad(r, labels[static_cast<std::size_t>(r)]) -= 1.0;
    }
    return grad / static_cast<double>(batch);
}

inline LossBreakdown total_loss(double ce, const TrimodalContrastive& ctr,
                                double lambda = kContrastiveWeightDefault,
                                double tau = kTemperatureDefault) {
    LossBreakdown breakdown;
    breakdown.ce = ce;
    breakdown.nce_seq_str = ctr.seq_str;
    breakdown.nce_seq_dyn = ctr.seq_dyn;
    breakdown.nce_str_dyn = ctr.str_dyn;
    breakdown.ctr = ctr.ctr;
    breakdown.lambda = lambda;
    breakdown.tau = tau;
    breakdown.total = ce + lambda * ctr.ctr;
    return breakdown;
}

}  // namespace trifit

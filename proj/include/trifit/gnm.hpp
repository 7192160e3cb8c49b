#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "trifit/error.hpp"
#include "trifit/pdb.hpp"

namespace trifit {

inline constexpr double kGnmCutoffDefault = 10.0;  // Angstrom
inline constexpr int kGnmModesDefault = 20;
inline constexpr double kZeroModeThreshold = 1e-8;

/// Contact-graph Laplacian over C-alpha atoms: Gamma_ij = -1 iff d_ij <= cutoff,
/// diagonal = contact degree. Assembled in integer arithmetic so row sums are
/// exactly zero.
struct Kirchhoff {
    Eigen::MatrixXd gamma;
    double cutoff = kGnmCutoffDefault;
};

/// Nonzero eigenpairs of a Kirchhoff matrix, ascending, unit-norm columns.
/// Sign convention: each column's largest-magnitude entry is positive.
struct GnmModes {
    Eigen::VectorXd eigenvalues;  // K, strictly positive, ascending
    Eigen::MatrixXd modes;        // L x K
};

enum class CrossCorrFormula {
    /// u_ik * (sum_j u_jk) / (L * lambda_k), falling back to the per-mode
    /// self-correlation u_ik^2 / lambda_k for columns whose entry sum vanishes
    /// (which it does exactly for every nonzero mode of a connected graph).
    mean_projection,
    /// Always u_ik^2 / lambda_k.
    self_correlation,
};

/// Per-residue dynamics feature bundle.
struct GnmResult {
    Eigen::VectorXd b;       // L, z-normalized B-factors
    Eigen::MatrixXd modes;   // L x K, zero-padded columns when L-1 < K
    Eigen::MatrixXd cross;   // L x K, same padding
    Eigen::VectorXd stiffness;  // L, z-normalized Kirchhoff diagonal
    int mode_count = 0;      // real (non-padded) columns
    int pad_count = 0;
};

inline Kirchhoff build_kirchhoff(const ProteinStructure& structure,
                                 double cutoff = kGnmCutoffDefault) {
    const auto count = static_cast<Eigen::Index>(structure.size());
    if (count < 2) throw Error("structure has fewer than 2 residues");
    Kirchhoff result;
    result.cutoff = cutoff;
    result.gamma = Eigen::MatrixXd::Zero(count, count);
    const double cutoff_sq = cutoff * cutoff;
    for (Eigen::Index i = 0; i < count; ++i) {
        long degree = 0;
        for (Eigen::Index j = 0; j < count; ++j) {
            if (j == i) continue;
            const double dist_sq =
                (structure.residues[static_cast<std::size_t>(j)].ca -
                 structure.residues[static_cast<std::size_t>(i)].ca)
                    .squaredNorm();
            if (dist_sq <= cutoff_sq) {
                result.gamma(i, j) = -1.0;
                ++degree;
            }
        }
        result.gamma(i, i) = static_cast<double>(degree);
    }
    return result;
}

namespace detail {

/// Flip eigenvector signs so the largest-magnitude entry is positive
/// (first such entry wins on exact magnitude ties).
inline void fix_mode_sign(Eigen::Ref<Eigen::VectorXd> mode) {
    Eigen::Index at = 0;
    mode.cwiseAbs().maxCoeff(&at);
    if (mode(at) < 0.0) mode = -mode;
}

}  // namespace detail

/// The k smallest strictly positive eigenpairs (eigenvalues <= 1e-8 count as
/// zero modes and are skipped). Returns all available pairs when fewer than k
/// exist. More than one zero mode means the contact graph is disconnected.
inline GnmModes decompose(const Kirchhoff& kirchhoff, int k = kGnmModesDefault) {
    const Eigen::Index size = kirchhoff.gamma.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kirchhoff.gamma);
    if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed");
    const Eigen::VectorXd& values = solver.eigenvalues();  // ascending

    Eigen::Index zero_modes = 0;
    while (zero_modes < size && values(zero_modes) <= kZeroModeThreshold) ++zero_modes;
    if (zero_modes > 1)
        throw Error("disconnected contact graph (" + std::to_string(zero_modes) +
                    " components)");

    const Eigen::Index available = size - zero_modes;
    const Eigen::Index keep = std::min<Eigen::Index>(k, available);
    GnmModes modes;
    modes.eigenvalues = values.segment(zero_modes, keep);
    modes.modes = solver.eigenvectors().middleCols(zero_modes, keep);
    for (Eigen::Index col = 0; col < keep; ++col)
        detail::fix_mode_sign(modes.modes.col(col));
    return modes;
}

/// z-normalize to mean 0 / population std 1; an (all-equal) constant vector
/// maps to zeros.
inline Eigen::VectorXd z_normalize(const Eigen::VectorXd& values) {
    const auto count = static_cast<double>(values.size());
    const double mean = values.mean();
    const double variance = (values.array() - mean).square().sum() / count;
    const double std_dev = std::sqrt(variance);
    if (std_dev <= 1e-12) return Eigen::VectorXd::Zero(values.size());
    return (values.array() - mean) / std_dev;
}

/// Raw per-residue flexibility: diagonal of the Kirchhoff pseudo-inverse via
/// the mode sum raw_i = sum_k u_ik^2 / lambda_k. Callers wanting the classic
/// B-factor must pass ALL nonzero modes, not a truncated set.
inline Eigen::VectorXd bfactors_raw(const GnmModes& modes) {
    const Eigen::Index size = modes.modes.rows();
    Eigen::VectorXd raw = Eigen::VectorXd::Zero(size);
    for (Eigen::Index k = 0; k < modes.eigenvalues.size(); ++k)
        raw += modes.modes.col(k).cwiseAbs2() / modes.eigenvalues(k);
    return raw;
}

/// z-normalized B-factors from the given mode set.
inline Eigen::VectorXd bfactors(const GnmModes& modes) { return z_normalize(bfactors_raw(modes)); }

/// Mode-projected cross-correlations, one column per mode.
inline Eigen::MatrixXd cross_correlations(
    const GnmModes& modes, CrossCorrFormula formula = CrossCorrFormula::mean_projection) {
    const Eigen::Index size = modes.modes.rows();
    const Eigen::Index count = modes.eigenvalues.size();
    Eigen::MatrixXd cross(size, count);
    for (Eigen::Index k = 0; k < count; ++k) {
        const auto mode = modes.modes.col(k);
        const double lambda = modes.eigenvalues(k);
        const double mode_sum = mode.sum();
        if (formula == CrossCorrFormula::mean_projection && std::abs(mode_sum) > 1e-9) {
            cross.col(k) = mode * (mode_sum / (static_cast<double>(size) * lambda));
        } else {
            cross.col(k) = mode.cwiseAbs2() / lambda;
        }
    }
    return cross;
}

/// Full dynamics bundle: B-factors from all nonzero modes, top-k mode shapes
/// and cross-correlations (zero-padded to k columns for short chains), and the
/// z-normalized stiffness diagonal.
inline GnmResult gnm_features(const ProteinStructure& structure,
                              double cutoff = kGnmCutoffDefault, int k = kGnmModesDefault,
                              CrossCorrFormula formula = CrossCorrFormula::mean_projection) {
    const Kirchhoff kirchhoff = build_kirchhoff(structure, cutoff);
    const Eigen::Index size = kirchhoff.gamma.rows();

    const GnmModes full = decompose(kirchhoff, static_cast<int>(size));
    GnmResult result;
    result.b = bfactors(full);
    result.stiffness = z_normalize(kirchhoff.gamma.diagonal());

    const Eigen::Index keep = std::min<Eigen::Index>(k, full.eigenvalues.size());
    GnmModes top;
    top.eigenvalues = full.eigenvalues.head(keep);
    top.modes = full.modes.leftCols(keep);

    result.modes = Eigen::MatrixXd::Zero(size, k);
    result.modes.leftCols(keep) = top.modes;
    result.cross = Eigen::MatrixXd::Zero(size, k);
    result.cross.leftCols(keep) = cross_correlations(top, formula);
    result.mode_count = static_cast<int>(keep);
    result.pad_count = static_cast<int>(k - keep);
    return result;
}

}  // namespace trifit

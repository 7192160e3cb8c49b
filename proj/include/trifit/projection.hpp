#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>

#include "trifit/error.hpp"
#include "trifit/rng.hpp"

namespace trifit {

/// Fixed random projection: entries i.i.d. normal scaled by 1/sqrt(in_dim),
/// fully determined by (seed, in_dim, out_dim). Regenerating with the same
/// triple reproduces the matrix bit-for-bit.
struct RandomProjection {
    std::uint64_t seed = 0;
    int in_dim = 0;
    int out_dim = 0;
    Eigen::MatrixXd matrix;  // in_dim x out_dim, filled row-major

    static RandomProjection generate(std::uint64_t seed, int in_dim, int out_dim) {
        RandomProjection proj;
        proj.seed = seed;
        proj.in_dim = in_dim;
        proj.out_dim = out_dim;
        proj.matrix.resize(in_dim, out_dim);
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(in_dim),
                         static_cast<std::uint64_t>(out_dim)));
        const double scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
        for (int row = 0; row < in_dim; ++row)
            for (int col = 0; col < out_dim; ++col) proj.matrix(row, col) = rng.normal() * scale;
        return proj;
    }

    /// e = W^T x. Pure linear map, no bias, no nonlinearity.
    Eigen::VectorXd apply(const Eigen::VectorXd& features) const {
        if (features.size() != in_dim)
            throw Error("projection input dim " + std::to_string(features.size()) +
                        ", expected " + std::to_string(in_dim));
        return matrix.transpose() * features;
    }
};

}  // namespace trifit

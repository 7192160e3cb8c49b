#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>

#include "trifit/amino_acid.hpp"
#include "trifit/constants.hpp"
#include "trifit/error.hpp"
#include "trifit/rng.hpp"

namespace trifit {

/// Masked-position context vector plus the residue token-embedding table.
struct SequenceContext {
    Eigen::VectorXd context;      // h_i, masked-position representation
    Eigen::MatrixXd token_table;  // 20 x dim, row per AminoAcid index
};

/// e_seq = h_i + (t_mut - t_wt).
inline Eigen::VectorXd compose_sequence_embedding(const SequenceContext& ctx, AminoAcid wt,
                                                  AminoAcid mut) {
    if (ctx.token_table.rows() != AminoAcid::kAlphabetSize ||
        ctx.token_table.cols() != ctx.context.size())
        throw Error("sequence context dimensions inconsistent");
    return ctx.context + (ctx.token_table.row(mut.index()) - ctx.token_table.row(wt.index()))
                             .transpose();
}

/// Deterministic stand-in for a frozen sequence encoder: context and token
/// table are seeded hashes of (sequence, position, seed) with unit-variance
/// entries. The token table does not depend on the position, matching the
/// real setup where it is a fixed embedding table.
inline SequenceContext mock_sequence_encoder(std::string_view sequence, int position,
                                             int dim = kSeqEmbedDim,
                                             std::uint64_t seed = kMockEncoderSeed) {
    if (position < 1 || static_cast<std::size_t>(position) > sequence.size())
        throw Error("position " + std::to_string(position) + " outside sequence of length " +
                    std::to_string(sequence.size()));
    SequenceContext ctx;
    ctx.context.resize(dim);
    Rng ctx_rng(mix_seed(seed, fnv1a(sequence), static_cast<std::uint64_t>(position)));
    for (int i = 0; i < dim; ++i) ctx.context(i) = ctx_rng.normal();

    ctx.token_table.resize(AminoAcid::kAlphabetSize, dim);
    Rng table_rng(mix_seed(seed, fnv1a(sequence)));
    for (int row = 0; row < AminoAcid::kAlphabetSize; ++row)
        for (int col = 0; col < dim; ++col) ctx.token_table(row, col) = table_rng.normal();
    return ctx;
}

}  // namespace trifit

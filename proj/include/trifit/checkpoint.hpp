#pragma once

#include <cstdint>
#include <cstring>
#include <optional>
#include <string>

#include "trifit/error.hpp"
#include "trifit/net.hpp"
#include "trifit/optim.hpp"
#include "trifit/store.hpp"

namespace trifit {

// Checkpoint layout (little-endian):
//   magic "TFCK" | version u32 | seed u64 | param_count u32 |
//   per parameter: name u16+bytes | ndim u8 | dims u32 x ndim | f32 x n |
//   has_state u8 | if 1: epoch u32 | adam_step u64 |
//   per parameter (same order): f64 moment1 x n, f64 moment2 x n
inline constexpr char kCheckpointMagic[4] = {'T', 'F', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct TrainState {
    AdamWState adamw;
    std::uint32_t epoch = 0;
};

struct Checkpoint {
    std::uint64_t seed = 0;
    FusionModel model = FusionModel::zeros();
    std::optional<TrainState> train_state;
};

inline std::string checkpoint_to_bytes(const Checkpoint& checkpoint) {
    std::string out;
    out.append(kCheckpointMagic, 4);
    detail::append_u32(out, kCheckpointVersion);
    detail::append_u64(out, checkpoint.seed);

    auto params = checkpoint.model.params();
    detail::append_u32(out, static_cast<std::uint32_t>(params.size()));
    for (const auto& ref : params) {
        detail::append_u16(out, static_cast<std::uint16_t>(ref.name.size()));
        out.append(ref.name);
        if (ref.cols == 1) {
            out.push_back(1);
            detail::append_u32(out, static_cast<std::uint32_t>(ref.rows));
        } else {
            out.push_back(2);
            detail::append_u32(out, static_cast<std::uint32_t>(ref.rows));
            detail::append_u32(out, static_cast<std::uint32_t>(ref.cols));
        }
        for (Eigen::Index i = 0; i < ref.size(); ++i)
            detail::append_f32(out, static_cast<float>(ref.data[i]));
    }

    if (checkpoint.train_state) {
        out.push_back(1);
        detail::append_u32(out, checkpoint.train_state->epoch);
        detail::append_u64(out, static_cast<std::uint64_t>(checkpoint.train_state->adamw.step));
        auto m1 = checkpoint.train_state->adamw.moment1.params();
        auto m2 = checkpoint.train_state->adamw.moment2.params();
        for (std::size_t p = 0; p < params.size(); ++p) {
            for (Eigen::Index i = 0; i < m1[p].size(); ++i)
                detail::append_f64(out, m1[p].data[i]);
            for (Eigen::Index i = 0; i < m2[p].size(); ++i)
                detail::append_f64(out, m2[p].data[i]);
        }
    } else {
        out.push_back(0);
    }
    return out;
}

inline Checkpoint checkpoint_from_bytes(std::string_view bytes) {
    detail::ByteReader reader(bytes, "checkpoint");
    const auto magic = reader.take(4);
    if (std::memcmp(magic.data(), kCheckpointMagic, 4) != 0) throw Error("not a checkpoint file");
    const std::uint32_t version = reader.u32();
    if (version != kCheckpointVersion)
        throw Error("unsupported checkpoint version " + std::to_string(version));

    Checkpoint checkpoint;
    checkpoint.seed = reader.u64();
    auto params = checkpoint.model.params();
    const std::uint32_t count = reader.u32();
    if (count != params.size())
        throw Error("checkpoint has " + std::to_string(count) + " parameters, expected " +
                    std::to_string(params.size()));
    for (auto& ref : params) {
        const std::uint16_t name_len = reader.u16();
        const std::string name(reader.take(name_len));
        if (name != ref.name) throw Error("unexpected parameter '" + name + "'");
        const std::uint8_t ndim = reader.u8();
        const std::uint32_t rows = reader.u32();
        const std::uint32_t cols = ndim == 2 ? reader.u32() : 1;
        if (static_cast<Eigen::Index>(rows) != ref.rows ||
            static_cast<Eigen::Index>(cols) != ref.cols)
            throw Error("shape mismatch for parameter '" + name + "'");
        for (Eigen::Index i = 0; i < ref.size(); ++i)
            ref.data[i] = static_cast<double>(reader.f32());
    }

    const std::uint8_t has_state = reader.u8();
    if (has_state) {
        TrainState state;
        state.epoch = reader.u32();
        state.adamw.step = static_cast<long>(reader.u64());
        auto m1 = state.adamw.moment1.params();
        auto m2 = state.adamw.moment2.params();
        for (std::size_t p = 0; p < params.size(); ++p) {
            for (Eigen::Index i = 0; i < m1[p].size(); ++i) m1[p].data[i] = reader.f64();
            for (Eigen::Index i = 0; i < m2[p].size(); ++i) m2[p].data[i] = reader.f64();
        }
        checkpoint.train_state = std::move(state);
    }
    if (!reader.at_end()) throw Error("trailing bytes after checkpoint payload");
    return checkpoint;
}

inline void checkpoint_write(const std::string& path, const Checkpoint& checkpoint) {
    write_file(path, checkpoint_to_bytes(checkpoint));
}

inline Checkpoint checkpoint_read(const std::string& path) {
    return checkpoint_from_bytes(read_file(path));
}

}  // namespace trifit

#pragma once

#include <cstdint>

namespace trifit {

// Embedding dimensions.
inline constexpr int kSeqEmbedDim = 1280;
inline constexpr int kStructEmbedDim = 512;
inline constexpr int kDynEmbedDim = 256;

// Per-site geometric features: 20 neighbor distances + 20 unit directions
// (3 components each) + unit vector toward the centroid (3).
inline constexpr int kNeighborCount = 20;
inline constexpr int kStructFeatureDim = kNeighborCount + 3 * kNeighborCount + 3;  // 83

// Per-site dynamics features: b + 20 mode entries + 20 cross-correlation
// entries + stiffness.
inline constexpr int kDynFeatureDim = 42;

// Documented default seeds for the fixed projection matrices, named after
// their in/out dimensions so independent runs agree byte-for-byte.
inline constexpr std::uint64_t kStructProjectionSeed = 83512;
inline constexpr std::uint64_t kDynProjectionSeed = 42256;
inline constexpr std::uint64_t kMockEncoderSeed = 1280;

// Fusion network shapes.
inline constexpr int kFusionDim = 512;
inline constexpr int kExpertHiddenDim = 512;
inline constexpr int kRouterHiddenDim = 64;
inline constexpr int kClassifierHiddenDim = 256;
inline constexpr int kExpertCount = 4;
inline constexpr int kClassCount = 2;
inline constexpr double kDropoutRate = 0.1;

// Training defaults.
inline constexpr double kLearningRateDefault = 3e-4;
inline constexpr double kWeightDecayDefault = 1e-4;
inline constexpr int kEpochsDefault = 20;
inline constexpr double kContrastiveWeightDefault = 0.3;  // lambda
inline constexpr double kTemperatureDefault = 0.07;       // tau
inline constexpr int kBatchSizeDefault = 256;

// Label binarization.
inline constexpr double kLabelQuantileDefault = 0.30;

}  // namespace trifit

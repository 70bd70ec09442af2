#pragma once

#include <span>
#include <vector>

#include "icm/matching.hpp"

namespace icm {

/// Linear annealing schedule: weight (1 - l/levels) * alpha + beta for
/// l = 0..levels-1, level 0 being the finest.
struct AnnealConfig {
  int levels = 1;
  double alpha = 1.0;
  double beta = 0.0;
};

/// Backward warp with nearest (integer) offsets; out-of-grid targets are
/// clamped to the border.
FeatureGrid warp_nearest(const FeatureGrid& feat, const FlowField& flow);

std::vector<double> anneal_weights(const AnnealConfig& cfg);

/// Residual blend per level: out_l = lighting_l + weights[l] * warped_l.
FeaturePyramid aggregate_residual(const FeaturePyramid& lighting,
                                  const FeaturePyramid& warped,
                                  std::span<const double> weights);

}  // namespace icm

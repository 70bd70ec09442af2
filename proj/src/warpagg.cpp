#include "icm/warpagg.hpp"

#include <algorithm>

#include "icm/errors.hpp"

namespace icm {

FeatureGrid warp_nearest(const FeatureGrid& feat, const FlowField& flow) {
  if (feat.values.ndim() != 3)
    throw DimensionError("warp_nearest expects [H,W,C] features");
  if (feat.height() != flow.h || feat.width() != flow.w)
    throw DimensionError("warp_nearest: feature and flow dims differ");
  const int64_t h = feat.height(), w = feat.width(), c = feat.channels();
  FeatureGrid out;
  out.level = feat.level;
  out.values = Tensor({h, w, c});
  for (int64_t r = 0; r < h; ++r)
    for (int64_t col = 0; col < w; ++col) {
      const int64_t sr = std::clamp<int64_t>(r + flow.dy_at(r, col), 0, h - 1);
      const int64_t sc =
          std::clamp<int64_t>(col + flow.dx_at(r, col), 0, w - 1);
      for (int64_t k = 0; k < c; ++k)
        out.values.at(r, col, k) = feat.values.at(sr, sc, k);
    }
  return out;
}

std::vector<double> anneal_weights(const AnnealConfig& cfg) {
  if (cfg.levels < 1) throw ContractError("anneal_weights: levels must be >= 1");
  if (cfg.alpha < 0.0 || cfg.beta < 0.0)
    throw ContractError("anneal_weights: alpha and beta must be >= 0");
  std::vector<double> w(static_cast<size_t>(cfg.levels));
  for (int l = 0; l < cfg.levels; ++l)
    w[static_cast<size_t>(l)] =
        (1.0 - static_cast<double>(l) / cfg.levels) * cfg.alpha + cfg.beta;
  return w;
}

FeaturePyramid aggregate_residual(const FeaturePyramid& lighting,
                                  const FeaturePyramid& warped,
                                  std::span<const double> weights) {
  if (lighting.size() != warped.size())
    throw DimensionError("aggregate_residual: pyramid level counts differ");
  if (weights.size() != lighting.size())
    throw DimensionError("aggregate_residual: weight count differs from levels");
  FeaturePyramid out;
  out.reserve(lighting.size());
  for (size_t l = 0; l < lighting.size(); ++l) {
    if (!lighting[l].values.same_dims(warped[l].values))
      throw DimensionError("aggregate_residual: level shapes differ");
    FeatureGrid g;
    g.level = lighting[l].level;
    g.values = lighting[l].values;
    const double wl = weights[l];
    for (int64_t i = 0; i < g.values.size(); ++i)
      g.values[i] = static_cast<float>(
          static_cast<double>(lighting[l].values[i]) + wl * warped[l].values[i]);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace icm

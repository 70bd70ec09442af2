#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "icm/tensor.hpp"

namespace icm {

/// One level of feature descriptors, values shaped [H,W,C].
struct FeatureGrid {
  int level = 0;
  Tensor values;

  int64_t height() const { return values.dim(0); }
  int64_t width() const { return values.dim(1); }
  int64_t channels() const { return values.dim(2); }
};

/// Level 0 is the finest grid (closest to the input); levels strictly coarsen.
using FeaturePyramid = std::vector<FeatureGrid>;

/// Normalized similarity scores between every source and target location.
/// window == 0 stores the full [H,W,H,W] volume; window R > 0 stores
/// [H,W,2R+1,2R+1] with the search restricted to |dr|,|dc| <= R.
class CostVolume {
 public:
  CostVolume(int64_t h, int64_t w, int64_t window);

  int64_t h() const { return h_; }
  int64_t w() const { return w_; }
  int64_t window() const { return window_; }

  /// True when (tr,tc) is inside the grid and inside (r,c)'s search window.
  bool stored(int64_t r, int64_t c, int64_t tr, int64_t tc) const;

  /// Score lookup; throws ContractError for unstored target locations.
  float at(int64_t r, int64_t c, int64_t tr, int64_t tc) const;

  float& slot(int64_t r, int64_t c, int64_t tr, int64_t tc);

  const std::vector<float>& raw() const { return scores_; }
  std::vector<int64_t> storage_dims() const;
  Tensor to_tensor() const;

 private:
  int64_t index(int64_t r, int64_t c, int64_t tr, int64_t tc) const;

  int64_t h_, w_, window_;
  std::vector<float> scores_;
};

/// Per-source-pixel integer offsets (dx = column delta, dy = row delta).
/// An empty valid vector means every pixel is valid.
struct FlowField {
  int64_t h = 0, w = 0;
  std::vector<int32_t> dx, dy;
  std::vector<uint8_t> valid;

  bool is_valid(int64_t r, int64_t c) const {
    return valid.empty() || valid[static_cast<size_t>(r * w + c)] != 0;
  }
  int32_t dx_at(int64_t r, int64_t c) const {
    return dx[static_cast<size_t>(r * w + c)];
  }
  int32_t dy_at(int64_t r, int64_t c) const {
    return dy[static_cast<size_t>(r * w + c)];
  }
};

struct CostVolumeOptions {
  int64_t window = 0;  // 0 = global search
  int threads = 1;     // >1 parallelizes over source rows, bitwise identical
};

/// Cosine similarity between every source/target descriptor pair. Zero-norm
/// descriptors score 0 against everything.
CostVolume cost_volume(const FeatureGrid& src, const FeatureGrid& tgt,
                       const CostVolumeOptions& opt = {});

/// Winner-take-all flow: per source pixel the best-scoring target, ties
/// broken by the smallest row-major target index.
FlowField argmax_flow(const CostVolume& c, int threads = 1);

/// MAP data term: sum of cost-volume scores along the flow.
double map_data_score(const CostVolume& c, const FlowField& f);

/// Stand-in descriptors: level 0 is the input image, each next level a 2x2
/// average pool; the descriptor at (r,c) is the mean-centered flattened
/// patch x patch neighborhood (edge-clamped), so C_l = patch^2 * C.
FeaturePyramid patch_descriptors(const Tensor& img, int levels, int64_t patch,
                                 int threads = 1);

// Flow serialization: [H,W,2] tensor (dx,dy) plus optional [H,W] validity.
Tensor flow_to_tensor(const FlowField& f);
Tensor flow_validity_tensor(const FlowField& f);
FlowField flow_from_tensor(const Tensor& t, const Tensor* validity = nullptr);

/// CSV rows "row,col,dx,dy,score" for valid pixels; scores come from the
/// cost volume when provided, else 0.
void write_flow_csv(const std::filesystem::path& path, const FlowField& f,
                    const CostVolume* scores = nullptr);

}  // namespace icm

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "icm/tensor.hpp"

namespace icm {

/// Boolean keep-grid over an H x W pixel lattice.
struct PixelMask {
  int64_t h = 0, w = 0;
  std::vector<uint8_t> keep;  // 1 = kept, 0 = dropped
  int64_t keep_count = 0;

  bool at(int64_t r, int64_t c) const {
    return keep[static_cast<size_t>(r * w + c)] != 0;
  }
};

/// Samples exactly round-half-up(keep_ratio * h * w) kept pixels, uniformly
/// without replacement (seeded partial Fisher-Yates over the flat index
/// range). Deterministic per seed.
PixelMask sample_mask(int64_t h, int64_t w, double keep_ratio, uint64_t seed);

/// keep[(r,c)] = ((r + c) mod 2 == phase). Comparison baseline.
PixelMask checkerboard_mask(int64_t h, int64_t w, int phase);

/// Kept pixels copied bit-exactly, dropped pixels set to fill on all channels.
Tensor apply_mask(const Tensor& img, const PixelMask& mask, float fill = 0.0f);

/// Masked style image concatenated width-wise with the reference: the dual
/// condition. ratio_used is drawn uniformly in (0, n_max); n_max = 0
/// degenerates to a fully masked left half.
struct ConditionInput {
  Tensor c_f;  // [H, 2W, C]
  PixelMask mask;
  double ratio_used = 0.0;
};

ConditionInput build_condition(const Tensor& z, const Tensor& z_ref,
                               double n_max, uint64_t seed);

/// Training target: z concatenated width-wise with z_ref.
Tensor build_target(const Tensor& z, const Tensor& z_ref);

// Mask export: [H,W] tensor of 1.0/0.0, or PGM with 255 = kept, 0 = dropped.
Tensor mask_to_tensor(const PixelMask& mask);
PixelMask mask_from_tensor(const Tensor& t);
void write_mask_pgm(const std::filesystem::path& path, const PixelMask& mask);

}  // namespace icm

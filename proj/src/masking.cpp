#include "icm/masking.hpp"

#include <fstream>
#include <numeric>

#include "icm/errors.hpp"
#include "icm/rng.hpp"

namespace icm {

PixelMask sample_mask(int64_t h, int64_t w, double keep_ratio, uint64_t seed) {
  if (h < 1 || w < 1) throw DimensionError("sample_mask: extents must be >= 1");
  if (!(keep_ratio >= 0.0 && keep_ratio <= 1.0))
    throw ContractError("sample_mask: keep_ratio must be in [0,1]");
  const int64_t n = h * w;
  int64_t k = round_half_up(keep_ratio * static_cast<double>(n));
  if (k > n) k = n;

  std::vector<int64_t> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), int64_t{0});
  Rng rng(seed);
  // Partial Fisher-Yates: after i swaps the first i entries are a uniform
  // i-subset in uniform order.
  for (int64_t i = 0; i < k; ++i) {
    const int64_t j =
        i + static_cast<int64_t>(rng.below(static_cast<uint64_t>(n - i)));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }

  PixelMask m;
  m.h = h;
  m.w = w;
  m.keep.assign(static_cast<size_t>(n), 0);
  for (int64_t i = 0; i < k; ++i) m.keep[static_cast<size_t>(idx[i])] = 1;
  m.keep_count = k;
  return m;
}

PixelMask checkerboard_mask(int64_t h, int64_t w, int phase) {
  if (h < 1 || w < 1)
    throw DimensionError("checkerboard_mask: extents must be >= 1");
  if (phase != 0 && phase != 1)
    throw ContractError("checkerboard_mask: phase must be 0 or 1");
  PixelMask m;
  m.h = h;
  m.w = w;
  m.keep.assign(static_cast<size_t>(h * w), 0);
  for (int64_t r = 0; r < h; ++r)
    for (int64_t c = 0; c < w; ++c)
      if ((r + c) % 2 == phase) {
        m.keep[static_cast<size_t>(r * w + c)] = 1;
        ++m.keep_count;
      }
  return m;
}

Tensor apply_mask(const Tensor& img, const PixelMask& mask, float fill) {
  if (img.ndim() != 3) throw DimensionError("apply_mask expects [H,W,C]");
  if (img.height() != mask.h || img.width() != mask.w)
    throw DimensionError("apply_mask: image and mask dims differ");
  Tensor out = img;
  const int64_t ch = img.channels();
  for (int64_t r = 0; r < mask.h; ++r)
    for (int64_t c = 0; c < mask.w; ++c)
      if (!mask.at(r, c))
        for (int64_t k = 0; k < ch; ++k) out.at(r, c, k) = fill;
  return out;
}

ConditionInput build_condition(const Tensor& z, const Tensor& z_ref,
                               double n_max, uint64_t seed) {
  if (z.ndim() != 3 || !z.same_dims(z_ref))
    throw DimensionError("build_condition: views must share [H,W,C] dims");
  if (!(n_max >= 0.0 && n_max <= 1.0))
    throw ContractError("build_condition: n_max must be in [0,1]");
  Rng rng(seed);
  double ratio = 0.0;
  if (n_max > 0.0) {
    do {
      ratio = rng.unit_open() * n_max;
    } while (!(ratio > 0.0 && ratio < n_max));
  }
  const PixelMask mask =
      sample_mask(z.height(), z.width(), ratio, rng.next());
  ConditionInput out;
  out.c_f = concat_width(apply_mask(z, mask), z_ref);
  out.mask = mask;
  out.ratio_used = ratio;
  return out;
}

Tensor build_target(const Tensor& z, const Tensor& z_ref) {
  if (z.ndim() != 3 || !z.same_dims(z_ref))
    throw DimensionError("build_target: views must share [H,W,C] dims");
  return concat_width(z, z_ref);
}

Tensor mask_to_tensor(const PixelMask& mask) {
  Tensor t({mask.h, mask.w});
  for (int64_t i = 0; i < mask.h * mask.w; ++i)
    t[i] = mask.keep[static_cast<size_t>(i)] ? 1.0f : 0.0f;
  return t;
}

PixelMask mask_from_tensor(const Tensor& t) {
  if (t.ndim() != 2 && !(t.ndim() == 3 && t.dim(2) == 1))
    throw DimensionError("mask tensor must be [H,W] or [H,W,1]");
  PixelMask m;
  m.h = t.dim(0);
  m.w = t.dim(1);
  m.keep.assign(static_cast<size_t>(m.h * m.w), 0);
  for (int64_t i = 0; i < m.h * m.w; ++i)
    if (t[i] > 0.5f) {
      m.keep[static_cast<size_t>(i)] = 1;
      ++m.keep_count;
    }
  return m;
}

void write_mask_pgm(const std::filesystem::path& path, const PixelMask& mask) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << "P5\n" << mask.w << " " << mask.h << "\n255\n";
  std::vector<unsigned char> bytes(static_cast<size_t>(mask.h * mask.w));
  for (int64_t i = 0; i < mask.h * mask.w; ++i)
    bytes[static_cast<size_t>(i)] =
        mask.keep[static_cast<size_t>(i)] ? 255 : 0;
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace icm

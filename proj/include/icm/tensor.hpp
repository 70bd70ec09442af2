#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "icm/errors.hpp"
#include "icm/rng.hpp"

namespace icm {

// Round-half-up for non-negative values.
inline int64_t round_half_up(double x) {
  return static_cast<int64_t>(std::floor(x + 0.5));
}

/// Dense row-major tensor of 32-bit floats, 1 to 4 dimensions.
/// Carrier for images ([H,W,C], channel-last), latents, features and
/// embeddings. Element count always equals the product of the extents.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int64_t> dims) : dims_(std::move(dims)) {
    data_.assign(static_cast<size_t>(checked_size(dims_)), 0.0f);
  }

  Tensor(std::vector<int64_t> dims, std::vector<float> data)
      : dims_(std::move(dims)), data_(std::move(data)) {
    if (checked_size(dims_) != static_cast<int64_t>(data_.size()))
      throw DimensionError("tensor data length does not match extents");
  }

  static Tensor filled(std::vector<int64_t> dims, float value) {
    Tensor t(std::move(dims));
    for (auto& v : t.data_) v = value;
    return t;
  }

  const std::vector<int64_t>& dims() const { return dims_; }
  int ndim() const { return static_cast<int>(dims_.size()); }
  int64_t dim(int i) const { return dims_[static_cast<size_t>(i)]; }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }
  bool same_dims(const Tensor& o) const { return dims_ == o.dims_; }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }

  float& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  float operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  // [H,W,C] image accessors; require a 3-d tensor.
  int64_t height() const { return image_dim(0); }
  int64_t width() const { return image_dim(1); }
  int64_t channels() const { return image_dim(2); }

  float& at(int64_t r, int64_t c, int64_t ch) {
    return data_[static_cast<size_t>((r * dims_[1] + c) * dims_[2] + ch)];
  }
  float at(int64_t r, int64_t c, int64_t ch) const {
    return data_[static_cast<size_t>((r * dims_[1] + c) * dims_[2] + ch)];
  }

 private:
  static int64_t checked_size(const std::vector<int64_t>& dims) {
    if (dims.empty() || dims.size() > 4)
      throw DimensionError("tensor must have 1 to 4 dimensions");
    int64_t n = 1;
    for (int64_t d : dims) {
      if (d < 1) throw DimensionError("tensor extents must be >= 1");
      if (n > (int64_t{1} << 40) / d)
        throw DimensionError("tensor too large");
      n *= d;
    }
    return n;
  }

  int64_t image_dim(int i) const {
    if (dims_.size() != 3) throw DimensionError("expected an [H,W,C] tensor");
    return dims_[static_cast<size_t>(i)];
  }

  std::vector<int64_t> dims_;
  std::vector<float> data_;
};

/// Width-wise concatenation of two [H,W,C] images: [H, a.W + b.W, C].
/// Columns [0, a.W) equal a bit-exactly, the rest equal b.
Tensor concat_width(const Tensor& a, const Tensor& b);

/// Exact inverse of concat_width; 0 < w < x.W.
std::pair<Tensor, Tensor> split_width(const Tensor& x, int64_t w);

// Binary tensor file ("ICMT" magic, little-endian, f32 payload).
void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

// Binary NetPBM: PGM P5 for 1 channel, PPM P6 for 3 channels, maxval 255.
// Values map [0,1] <-> [0,255] with round-half-up on write.
void write_image(const std::filesystem::path& path, const Tensor& img);
Tensor read_image(const std::filesystem::path& path);

// Seeded random tensors.
Tensor randn(std::vector<int64_t> dims, Rng& rng);
Tensor rand_uniform(std::vector<int64_t> dims, Rng& rng, float lo = 0.0f,
                    float hi = 1.0f);

/// Root-mean-square difference between two same-shaped tensors.
double rmse(const Tensor& a, const Tensor& b);

}  // namespace icm

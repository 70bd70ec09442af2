#include "icm/matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "icm/errors.hpp"

namespace icm {

CostVolume::CostVolume(int64_t h, int64_t w, int64_t window)
    : h_(h), w_(w), window_(window) {
  if (h < 1 || w < 1) throw DimensionError("cost volume: empty grid");
  if (window < 0) throw ContractError("cost volume: negative window");
  const int64_t per_src = window_ == 0
                              ? h_ * w_
                              : (2 * window_ + 1) * (2 * window_ + 1);
  // Slots whose target falls outside the grid keep the sentinel; it is below
  // the cosine range so argmax never selects it.
  scores_.assign(static_cast<size_t>(h_ * w_ * per_src), -2.0f);
}

bool CostVolume::stored(int64_t r, int64_t c, int64_t tr, int64_t tc) const {
  if (r < 0 || r >= h_ || c < 0 || c >= w_) return false;
  if (tr < 0 || tr >= h_ || tc < 0 || tc >= w_) return false;
  if (window_ > 0 &&
      (std::abs(tr - r) > window_ || std::abs(tc - c) > window_))
    return false;
  return true;
}

int64_t CostVolume::index(int64_t r, int64_t c, int64_t tr, int64_t tc) const {
  if (window_ == 0) return ((r * w_ + c) * h_ + tr) * w_ + tc;
  const int64_t k = 2 * window_ + 1;
  return ((r * w_ + c) * k + (tr - r + window_)) * k + (tc - c + window_);
}

float CostVolume::at(int64_t r, int64_t c, int64_t tr, int64_t tc) const {
  if (!stored(r, c, tr, tc))
    throw ContractError("cost volume lookup outside grid or search window");
  return scores_[static_cast<size_t>(index(r, c, tr, tc))];
}

float& CostVolume::slot(int64_t r, int64_t c, int64_t tr, int64_t tc) {
  return scores_[static_cast<size_t>(index(r, c, tr, tc))];
}

std::vector<int64_t> CostVolume::storage_dims() const {
  if (window_ == 0) return {h_, w_, h_, w_};
  return {h_, w_, 2 * window_ + 1, 2 * window_ + 1};
}

Tensor CostVolume::to_tensor() const {
  return Tensor(storage_dims(), scores_);
}

namespace {

std::vector<double> inverse_norms(const Tensor& values) {
  const int64_t n = values.dim(0) * values.dim(1), c = values.dim(2);
  std::vector<double> inv(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    const float* v = values.data() + i * c;
    for (int64_t k = 0; k < c; ++k)
      s += static_cast<double>(v[k]) * static_cast<double>(v[k]);
    inv[static_cast<size_t>(i)] = s == 0.0 ? 0.0 : 1.0 / std::sqrt(s);
  }
  return inv;
}

}  // namespace

CostVolume cost_volume(const FeatureGrid& src, const FeatureGrid& tgt,
                       const CostVolumeOptions& opt) {
  if (src.values.ndim() != 3 || tgt.values.ndim() != 3 ||
      !src.values.same_dims(tgt.values))
    throw DimensionError("cost_volume: grids must share [H,W,C] dims");
  if (opt.threads < 1) throw ContractError("cost_volume: threads must be >= 1");
  const int64_t h = src.height(), w = src.width(), c = src.channels();
  const std::vector<double> inv_src = inverse_norms(src.values);
  const std::vector<double> inv_tgt = inverse_norms(tgt.values);
  CostVolume vol(h, w, opt.window);

  const float* sp = src.values.data();
  const float* tp = tgt.values.data();
  // Each entry is computed with the same arithmetic regardless of the row
  // partition, so the parallel result is bitwise identical to the serial one.
  auto fill_row = [&](int64_t r) {
    for (int64_t col = 0; col < w; ++col) {
      const float* a = sp + (r * w + col) * c;
      const double ia = inv_src[static_cast<size_t>(r * w + col)];
      const int64_t tr0 = opt.window == 0 ? 0 : std::max<int64_t>(0, r - opt.window);
      const int64_t tr1 = opt.window == 0 ? h - 1 : std::min<int64_t>(h - 1, r + opt.window);
      const int64_t tc0 = opt.window == 0 ? 0 : std::max<int64_t>(0, col - opt.window);
      const int64_t tc1 = opt.window == 0 ? w - 1 : std::min<int64_t>(w - 1, col + opt.window);
      for (int64_t tr = tr0; tr <= tr1; ++tr)
        for (int64_t tc = tc0; tc <= tc1; ++tc) {
          const float* b = tp + (tr * w + tc) * c;
          const double ib = inv_tgt[static_cast<size_t>(tr * w + tc)];
          double v = 0.0;
          if (ia != 0.0 && ib != 0.0) {
            double dot = 0.0;
            for (int64_t k = 0; k < c; ++k)
              dot += static_cast<double>(a[k]) * static_cast<double>(b[k]);
            v = std::clamp(dot * ia * ib, -1.0, 1.0);
          }
          vol.slot(r, col, tr, tc) = static_cast<float>(v);
        }
    }
  };

  if (opt.threads > 1) {
#pragma omp parallel for schedule(static) num_threads(opt.threads)
    for (int64_t r = 0; r < h; ++r) fill_row(r);
  } else {
    for (int64_t r = 0; r < h; ++r) fill_row(r);
  }
  return vol;
}

FlowField argmax_flow(const CostVolume& c, int threads) {
  if (threads < 1) throw ContractError("argmax_flow: threads must be >= 1");
  const int64_t h = c.h(), w = c.w(), win = c.window();
  FlowField f;
  f.h = h;
  f.w = w;
  f.dx.assign(static_cast<size_t>(h * w), 0);
  f.dy.assign(static_cast<size_t>(h * w), 0);

  auto fill_row = [&](int64_t r) {
    for (int64_t col = 0; col < w; ++col) {
      const int64_t tr0 = win == 0 ? 0 : std::max<int64_t>(0, r - win);
      const int64_t tr1 = win == 0 ? h - 1 : std::min<int64_t>(h - 1, r + win);
      const int64_t tc0 = win == 0 ? 0 : std::max<int64_t>(0, col - win);
      const int64_t tc1 = win == 0 ? w - 1 : std::min<int64_t>(w - 1, col + win);
      float best = -3.0f;
      int64_t best_r = tr0, best_c = tc0;
      // Row-major target scan with strict improvement keeps the first (= the
      // smallest row-major index) of tied maxima.
      for (int64_t tr = tr0; tr <= tr1; ++tr)
        for (int64_t tc = tc0; tc <= tc1; ++tc) {
          const float v = c.at(r, col, tr, tc);
          if (v > best) {
            best = v;
            best_r = tr;
            best_c = tc;
          }
        }
      f.dy[static_cast<size_t>(r * w + col)] = static_cast<int32_t>(best_r - r);
      f.dx[static_cast<size_t>(r * w + col)] = static_cast<int32_t>(best_c - col);
    }
  };

  if (threads > 1) {
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int64_t r = 0; r < h; ++r) fill_row(r);
  } else {
    for (int64_t r = 0; r < h; ++r) fill_row(r);
  }
  return f;
}

double map_data_score(const CostVolume& c, const FlowField& f) {
  if (f.h != c.h() || f.w != c.w())
    throw DimensionError("map_data_score: flow and volume grids differ");
  double score = 0.0;
  for (int64_t r = 0; r < f.h; ++r)
    for (int64_t col = 0; col < f.w; ++col) {
      if (!f.is_valid(r, col)) continue;
      score += c.at(r, col, r + f.dy_at(r, col), col + f.dx_at(r, col));
    }
  return score;
}

namespace {

Tensor pool2x2(const Tensor& img) {
  const int64_t h = img.height() / 2, w = img.width() / 2, c = img.channels();
  Tensor out({h, w, c});
  for (int64_t r = 0; r < h; ++r)
    for (int64_t col = 0; col < w; ++col)
      for (int64_t k = 0; k < c; ++k) {
        const double s = static_cast<double>(img.at(2 * r, 2 * col, k)) +
                         img.at(2 * r, 2 * col + 1, k) +
                         img.at(2 * r + 1, 2 * col, k) +
                         img.at(2 * r + 1, 2 * col + 1, k);
        out.at(r, col, k) = static_cast<float>(s * 0.25);
      }
  return out;
}

FeatureGrid describe(const Tensor& img, int level, int64_t patch,
                     int threads) {
  const int64_t h = img.height(), w = img.width(), c = img.channels();
  const int64_t half = patch / 2, cl = patch * patch * c;
  FeatureGrid g;
  g.level = level;
  g.values = Tensor({h, w, cl});
  auto fill_row = [&](int64_t r) {
    std::vector<double> buf(static_cast<size_t>(cl));
    for (int64_t col = 0; col < w; ++col) {
      double sum = 0.0;
      int64_t i = 0;
      for (int64_t dr = -half; dr <= half; ++dr)
        for (int64_t dc = -half; dc <= half; ++dc) {
          const int64_t rr = std::clamp<int64_t>(r + dr, 0, h - 1);
          const int64_t cc = std::clamp<int64_t>(col + dc, 0, w - 1);
          for (int64_t k = 0; k < c; ++k) {
            const double v = img.at(rr, cc, k);
            buf[static_cast<size_t>(i++)] = v;
            sum += v;
          }
        }
      const double mean = sum / static_cast<double>(cl);
      float* out = g.values.data() + (r * w + col) * cl;
      for (int64_t j = 0; j < cl; ++j)
        out[j] = static_cast<float>(buf[static_cast<size_t>(j)] - mean);
    }
  };
  if (threads > 1) {
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int64_t r = 0; r < h; ++r) fill_row(r);
  } else {
    for (int64_t r = 0; r < h; ++r) fill_row(r);
  }
  return g;
}

}  // namespace

FeaturePyramid patch_descriptors(const Tensor& img, int levels, int64_t patch,
                                 int threads) {
  if (img.ndim() != 3) throw DimensionError("patch_descriptors expects [H,W,C]");
  if (levels < 1) throw ContractError("patch_descriptors: levels must be >= 1");
  if (patch < 1 || patch % 2 == 0)
    throw ContractError("patch_descriptors: patch extent must be odd");
  const int64_t min_side = int64_t{1} << (levels - 1);
  if (img.height() < min_side || img.width() < min_side)
    throw DimensionError("patch_descriptors: image smaller than 2^(levels-1)");

  FeaturePyramid pyr;
  Tensor cur = img;
  for (int l = 0; l < levels; ++l) {
    pyr.push_back(describe(cur, l, patch, threads));
    if (l + 1 < levels) cur = pool2x2(cur);
  }
  return pyr;
}

Tensor flow_to_tensor(const FlowField& f) {
  Tensor t({f.h, f.w, 2});
  for (int64_t i = 0; i < f.h * f.w; ++i) {
    t[2 * i] = static_cast<float>(f.dx[static_cast<size_t>(i)]);
    t[2 * i + 1] = static_cast<float>(f.dy[static_cast<size_t>(i)]);
  }
  return t;
}

Tensor flow_validity_tensor(const FlowField& f) {
  Tensor t({f.h, f.w});
  for (int64_t i = 0; i < f.h * f.w; ++i)
    t[i] = f.is_valid(i / f.w, i % f.w) ? 1.0f : 0.0f;
  return t;
}

FlowField flow_from_tensor(const Tensor& t, const Tensor* validity) {
  if (t.ndim() != 3 || t.dim(2) != 2)
    throw DimensionError("flow tensor must be [H,W,2]");
  FlowField f;
  f.h = t.dim(0);
  f.w = t.dim(1);
  f.dx.resize(static_cast<size_t>(f.h * f.w));
  f.dy.resize(static_cast<size_t>(f.h * f.w));
  for (int64_t i = 0; i < f.h * f.w; ++i) {
    f.dx[static_cast<size_t>(i)] = static_cast<int32_t>(std::llround(t[2 * i]));
    f.dy[static_cast<size_t>(i)] =
        static_cast<int32_t>(std::llround(t[2 * i + 1]));
  }
  if (validity) {
    if (validity->dim(0) != f.h || validity->dim(1) != f.w)
      throw DimensionError("flow validity grid dims differ");
    f.valid.resize(static_cast<size_t>(f.h * f.w));
    for (int64_t i = 0; i < f.h * f.w; ++i)
      f.valid[static_cast<size_t>(i)] = (*validity)[i] > 0.5f ? 1 : 0;
  }
  return f;
}

void write_flow_csv(const std::filesystem::path& path, const FlowField& f,
                    const CostVolume* scores) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << "row,col,dx,dy,score\n";
  char line[128];
  for (int64_t r = 0; r < f.h; ++r)
    for (int64_t c = 0; c < f.w; ++c) {
      if (!f.is_valid(r, c)) continue;
      double s = 0.0;
      if (scores)
        s = scores->at(r, c, r + f.dy_at(r, c), c + f.dx_at(r, c));
      std::snprintf(line, sizeof(line), "%lld,%lld,%d,%d,%.9g\n",
                    static_cast<long long>(r), static_cast<long long>(c),
                    f.dx_at(r, c), f.dy_at(r, c), s);
      os << line;
    }
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace icm

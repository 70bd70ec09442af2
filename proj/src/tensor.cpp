#include "icm/tensor.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <string>

namespace icm {

namespace {

constexpr char kMagic[4] = {'I', 'C', 'M', 'T'};
constexpr uint32_t kVersion = 1;
constexpr uint32_t kDtypeF32 = 0;

void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

bool get_u32(std::istream& is, uint32_t& v) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
  v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return true;
}

bool get_u64(std::istream& is, uint64_t& v) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return true;
}

}  // namespace

Tensor concat_width(const Tensor& a, const Tensor& b) {
  if (a.ndim() != 3 || b.ndim() != 3)
    throw DimensionError("concat_width expects [H,W,C] tensors");
  if (a.height() != b.height() || a.channels() != b.channels())
    throw DimensionError("concat_width: height or channel mismatch");
  const int64_t h = a.height(), wa = a.width(), wb = b.width(),
                c = a.channels();
  Tensor out({h, wa + wb, c});
  for (int64_t r = 0; r < h; ++r) {
    std::memcpy(out.data() + (r * (wa + wb)) * c, a.data() + r * wa * c,
                static_cast<size_t>(wa * c) * sizeof(float));
    std::memcpy(out.data() + (r * (wa + wb) + wa) * c, b.data() + r * wb * c,
                static_cast<size_t>(wb * c) * sizeof(float));
  }
  return out;
}

std::pair<Tensor, Tensor> split_width(const Tensor& x, int64_t w) {
  if (x.ndim() != 3) throw DimensionError("split_width expects [H,W,C]");
  if (w <= 0 || w >= x.width())
    throw DimensionError("split_width: split column out of range");
  const int64_t h = x.height(), wx = x.width(), c = x.channels();
  Tensor a({h, w, c}), b({h, wx - w, c});
  for (int64_t r = 0; r < h; ++r) {
    std::memcpy(a.data() + r * w * c, x.data() + (r * wx) * c,
                static_cast<size_t>(w * c) * sizeof(float));
    std::memcpy(b.data() + r * (wx - w) * c, x.data() + (r * wx + w) * c,
                static_cast<size_t>((wx - w) * c) * sizeof(float));
  }
  return {std::move(a), std::move(b)};
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_u32(os, kDtypeF32);
  put_u32(os, static_cast<uint32_t>(t.ndim()));
  for (int i = 0; i < t.ndim(); ++i)
    put_u64(os, static_cast<uint64_t>(t.dim(i)));
  for (int64_t i = 0; i < t.size(); ++i) {
    uint32_t bits;
    float v = t[i];
    std::memcpy(&bits, &v, 4);
    put_u32(os, bits);
  }
  if (!os) throw IoError("write failed: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("bad magic in " + path.string());
  uint32_t version = 0, dtype = 0, ndim = 0;
  if (!get_u32(is, version) || version != kVersion)
    throw FormatError("unsupported version in " + path.string());
  if (!get_u32(is, dtype) || dtype != kDtypeF32)
    throw FormatError("unsupported dtype in " + path.string());
  if (!get_u32(is, ndim) || ndim < 1 || ndim > 4)
    throw FormatError("bad dimension count in " + path.string());
  std::vector<int64_t> dims(ndim);
  int64_t n = 1;
  for (uint32_t i = 0; i < ndim; ++i) {
    uint64_t e = 0;
    if (!get_u64(is, e) || e < 1 || e > (uint64_t{1} << 32))
      throw FormatError("bad extent in " + path.string());
    dims[i] = static_cast<int64_t>(e);
    if (n > (int64_t{1} << 40) / dims[i])
      throw FormatError("declared size too large in " + path.string());
    n *= dims[i];
  }
  std::vector<float> data(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    uint32_t bits = 0;
    if (!get_u32(is, bits))
      throw FormatError("truncated payload in " + path.string());
    std::memcpy(&data[static_cast<size_t>(i)], &bits, 4);
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw FormatError("payload length does not match extents in " +
                      path.string());
  return Tensor(std::move(dims), std::move(data));
}

void write_image(const std::filesystem::path& path, const Tensor& img) {
  if (img.ndim() != 3) throw DimensionError("image must be [H,W,C]");
  const int64_t c = img.channels();
  if (c != 1 && c != 3)
    throw DimensionError("displayable images need 1 or 3 channels");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << (c == 1 ? "P5" : "P6") << "\n"
     << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> row(static_cast<size_t>(img.width() * c));
  for (int64_t r = 0; r < img.height(); ++r) {
    for (int64_t i = 0; i < img.width() * c; ++i) {
      double v = img[(r * img.width()) * c + i];
      v = std::clamp(v, 0.0, 1.0);
      row[static_cast<size_t>(i)] =
          static_cast<unsigned char>(round_half_up(v * 255.0));
    }
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size()));
  }
  if (!os) throw IoError("write failed: " + path.string());
}

namespace {

// Reads a whitespace/comment-separated PNM header token.
std::string pnm_token(std::istream& is) {
  std::string tok;
  int ch;
  while ((ch = is.get()) != EOF) {
    if (ch == '#') {
      while ((ch = is.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

}  // namespace

Tensor read_image(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  const std::string magic = pnm_token(is);
  int64_t c = 0;
  if (magic == "P5")
    c = 1;
  else if (magic == "P6")
    c = 3;
  else
    throw FormatError("unsupported image magic in " + path.string());
  int64_t w = 0, h = 0, maxval = 0;
  try {
    w = std::stoll(pnm_token(is));
    h = std::stoll(pnm_token(is));
    maxval = std::stoll(pnm_token(is));
  } catch (const std::exception&) {
    throw FormatError("bad image header in " + path.string());
  }
  if (w < 1 || h < 1) throw FormatError("bad image size in " + path.string());
  if (maxval != 255)
    throw FormatError("only maxval 255 supported in " + path.string());
  std::vector<unsigned char> bytes(static_cast<size_t>(h * w * c));
  if (!is.read(reinterpret_cast<char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size())))
    throw FormatError("truncated image payload in " + path.string());
  Tensor img({h, w, c});
  for (int64_t i = 0; i < h * w * c; ++i)
    img[i] = static_cast<float>(bytes[static_cast<size_t>(i)]) / 255.0f;
  return img;
}

Tensor randn(std::vector<int64_t> dims, Rng& rng) {
  Tensor t(std::move(dims));
  for (int64_t i = 0; i < t.size(); ++i)
    t[i] = static_cast<float>(rng.normal());
  return t;
}

Tensor rand_uniform(std::vector<int64_t> dims, Rng& rng, float lo, float hi) {
  Tensor t(std::move(dims));
  for (int64_t i = 0; i < t.size(); ++i)
    t[i] = lo + (hi - lo) * static_cast<float>(rng.unit());
  return t;
}

double rmse(const Tensor& a, const Tensor& b) {
  if (!a.same_dims(b)) throw DimensionError("rmse: shape mismatch");
  double s = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace icm

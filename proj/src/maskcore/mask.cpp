#include "udos/maskcore/mask.hpp"

#include <algorithm>
#include <sstream>

#include "udos/maskcore/error.hpp"

namespace udos {

namespace {

void check_dims(int height, int width) {
  if (height < 0 || width < 0) {
    std::ostringstream os;
    os << "raster dimensions must be non-negative, got " << height << "x" << width;
    throw InvalidArgument(os.str());
  }
}

void check_same_dims(const BinaryMask& a, const BinaryMask& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    std::ostringstream os;
    os << "incompatible rasters: " << a.height() << "x" << a.width() << " vs "
       << b.height() << "x" << b.width();
    throw DimensionMismatch(os.str());
  }
}

}  // namespace

RleCounts rle_encode(int height, int width, std::span<const uint8_t> dense) {
  check_dims(height, width);
  const size_t n = static_cast<size_t>(height) * width;
  if (dense.size() != n) {
    std::ostringstream os;
    os << "dense raster has " << dense.size() << " pixels, expected " << n;
    throw DimensionMismatch(os.str());
  }
  RleCounts counts;
  bool current = false;
  uint32_t run = 0;
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) {
      const bool v = dense[static_cast<size_t>(y) * width + x] != 0;
      if (v != current) {
        counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  counts.push_back(run);
  return counts;
}

std::vector<uint8_t> rle_decode(int height, int width, std::span<const uint32_t> counts) {
  check_dims(height, width);
  const uint64_t n = static_cast<uint64_t>(height) * width;
  uint64_t total = 0;
  for (uint32_t c : counts) total += c;
  if (total != n) {
    std::ostringstream os;
    os << "RLE counts sum to " << total << ", expected " << height << "*" << width
       << " = " << n;
    throw FormatError(os.str());
  }
  std::vector<uint8_t> dense(n, 0);
  uint64_t pos = 0;
  bool fg = false;
  for (uint32_t c : counts) {
    if (fg) {
      for (uint64_t p = pos; p < pos + c; ++p) {
        const uint64_t x = p / height;
        const uint64_t y = p % height;
        dense[y * width + x] = 1;
      }
    }
    pos += c;
    fg = !fg;
  }
  return dense;
}

std::string rle_to_string(std::span<const uint32_t> counts) {
  std::string s;
  s.reserve(counts.size() * 2);
  for (size_t i = 0; i < counts.size(); ++i) {
    int64_t x = counts[i];
    if (i > 2) x -= static_cast<int64_t>(counts[i - 2]);
    bool more = true;
    while (more) {
      char c = static_cast<char>(x & 0x1f);
      x >>= 5;  // arithmetic shift keeps the sign
      more = (c & 0x10) ? x != -1 : x != 0;
      if (more) c |= 0x20;
      s.push_back(static_cast<char>(c + 48));
    }
  }
  return s;
}

RleCounts rle_from_string(std::string_view s) {
  RleCounts counts;
  size_t p = 0;
  while (p < s.size()) {
    int64_t x = 0;
    int k = 0;
    bool more = true;
    while (more) {
      if (p >= s.size()) throw FormatError("truncated compressed RLE string");
      const int c = static_cast<int>(static_cast<unsigned char>(s[p])) - 48;
      if (c < 0 || c > 63) {
        std::ostringstream os;
        os << "invalid character in compressed RLE string at offset " << p;
        throw FormatError(os.str());
      }
      if (k >= 12) throw FormatError("compressed RLE value overflows 64 bits");
      x |= static_cast<int64_t>(c & 0x1f) << (5 * k);
      more = (c & 0x20) != 0;
      ++p;
      ++k;
      if (!more && (c & 0x10)) x |= static_cast<int64_t>(-1) * (int64_t{1} << (5 * k));
    }
    const size_t m = counts.size();
    if (m > 2) x += static_cast<int64_t>(counts[m - 2]);
    if (x < 0 || x > static_cast<int64_t>(UINT32_MAX)) {
      throw FormatError("compressed RLE decodes to an out-of-range run length");
    }
    counts.push_back(static_cast<uint32_t>(x));
  }
  return counts;
}

BinaryMask::BinaryMask(int height, int width)
    : height_(height), width_(width) {
  check_dims(height, width);
  counts_.push_back(static_cast<uint32_t>(static_cast<int64_t>(height) * width));
}

BinaryMask BinaryMask::from_dense(int height, int width, std::span<const uint8_t> dense) {
  RleCounts counts = rle_encode(height, width, dense);
  int64_t area = 0;
  for (size_t i = 1; i < counts.size(); i += 2) area += counts[i];
  return BinaryMask(height, width, std::move(counts), area);
}

BinaryMask BinaryMask::from_rle(int height, int width, RleCounts counts) {
  check_dims(height, width);
  uint64_t total = 0;
  int64_t area = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    total += counts[i];
    if (i % 2 == 1) area += counts[i];
  }
  if (total != static_cast<uint64_t>(height) * width) {
    std::ostringstream os;
    os << "RLE counts sum to " << total << ", expected " << height << "*" << width;
    throw FormatError(os.str());
  }
  // Canonical form: no zero-length runs except a leading background run.
  RleCounts canon;
  canon.reserve(counts.size());
  bool last_fg = false;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const bool run_fg = (i % 2 == 1);
    if (canon.empty()) {
      if (run_fg) canon.push_back(0);
      canon.push_back(counts[i]);
    } else if (run_fg == last_fg) {
      canon.back() += counts[i];
    } else {
      canon.push_back(counts[i]);
    }
    last_fg = run_fg;
  }
  if (canon.empty()) canon.push_back(0);
  return BinaryMask(height, width, std::move(canon), area);
}

BinaryMask BinaryMask::from_rect(int height, int width, int x1, int y1, int x2, int y2) {
  check_dims(height, width);
  x1 = std::clamp(x1, 0, width);
  x2 = std::clamp(x2, 0, width);
  y1 = std::clamp(y1, 0, height);
  y2 = std::clamp(y2, 0, height);
  if (x2 <= x1 || y2 <= y1) return BinaryMask(height, width);
  RleCounts counts;
  const uint32_t col_h = static_cast<uint32_t>(y2 - y1);
  const uint32_t gap = static_cast<uint32_t>(height) - col_h;
  counts.push_back(static_cast<uint32_t>(x1) * height + y1);
  for (int x = x1; x < x2; ++x) {
    counts.push_back(col_h);
    if (x + 1 < x2) counts.push_back(gap);
  }
  counts.push_back(static_cast<uint32_t>(height - y2) +
                   static_cast<uint32_t>(width - x2) * height);
  return from_rle(height, width, std::move(counts));
}

std::vector<uint8_t> BinaryMask::to_dense() const {
  return rle_decode(height_, width_, counts_);
}

std::optional<Box> BinaryMask::tight_box() const {
  if (area_ == 0) return std::nullopt;
  int64_t min_x = width_, max_x = -1, min_y = height_, max_y = -1;
  int64_t pos = 0;
  for (size_t i = 0; i < counts_.size(); ++i) {
    const int64_t c = counts_[i];
    if (i % 2 == 1 && c > 0) {
      const int64_t first = pos;
      const int64_t last = pos + c - 1;
      const int64_t x0 = first / height_;
      const int64_t x1 = last / height_;
      min_x = std::min(min_x, x0);
      max_x = std::max(max_x, x1);
      if (x0 == x1) {
        min_y = std::min(min_y, first % height_);
        max_y = std::max(max_y, last % height_);
      } else {
        // The run ends column x0 at the bottom row and starts column x1 at
        // the top row.
        min_y = 0;
        max_y = height_ - 1;
      }
    }
    pos += c;
  }
  return Box::from_corners(static_cast<double>(min_x), static_cast<double>(min_y),
                           static_cast<double>(max_x + 1), static_cast<double>(max_y + 1));
}

int64_t intersection_area(const BinaryMask& a, const BinaryMask& b) {
  check_same_dims(a, b);
  const RleCounts& ca = a.counts();
  const RleCounts& cb = b.counts();
  size_t ia = 0, ib = 0;
  int64_t ra = ca.empty() ? 0 : ca[0];
  int64_t rb = cb.empty() ? 0 : cb[0];
  bool va = false, vb = false;
  int64_t inter = 0;
  while (ia < ca.size() && ib < cb.size()) {
    const int64_t step = std::min(ra, rb);
    if (va && vb) inter += step;
    ra -= step;
    rb -= step;
    if (ra == 0) {
      ++ia;
      if (ia < ca.size()) ra = ca[ia];
      va = !va;
    }
    if (rb == 0) {
      ++ib;
      if (ib < cb.size()) rb = cb[ib];
      vb = !vb;
    }
  }
  return inter;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  check_same_dims(a, b);
  const int64_t inter = intersection_area(a, b);
  const int64_t uni = a.area() + b.area() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask mask_union(std::span<const BinaryMask> masks) {
  if (masks.empty()) throw InvalidArgument("mask_union needs at least one mask");
  const BinaryMask& first = masks.front();
  if (masks.size() == 1) return first;
  for (const BinaryMask& m : masks) check_same_dims(first, m);
  const int h = first.height();
  const int w = first.width();
  // Column-major accumulation so runs can be painted directly.
  std::vector<uint8_t> colmajor(static_cast<size_t>(h) * w, 0);
  for (const BinaryMask& m : masks) {
    int64_t pos = 0;
    const RleCounts& c = m.counts();
    for (size_t i = 0; i < c.size(); ++i) {
      if (i % 2 == 1) std::fill_n(colmajor.begin() + pos, c[i], uint8_t{1});
      pos += c[i];
    }
  }
  RleCounts counts;
  bool current = false;
  uint32_t run = 0;
  for (uint8_t v : colmajor) {
    if ((v != 0) != current) {
      counts.push_back(run);
      run = 0;
      current = !current;
    }
    ++run;
  }
  counts.push_back(run);
  return BinaryMask::from_rle(h, w, std::move(counts));
}

}  // namespace udos

#include "udos/featurespace/pyramid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "udos/maskcore/error.hpp"

namespace udos::features {

FeaturePyramid::FeaturePyramid(int image_height, int image_width,
                               std::vector<FeatureLevel> levels)
    : image_height_(image_height), image_width_(image_width), levels_(std::move(levels)) {
  if (image_height_ <= 0 || image_width_ <= 0) {
    throw InvalidArgument("feature pyramid needs a nonempty image extent");
  }
  if (levels_.empty()) throw InvalidArgument("feature pyramid needs at least one level");
  for (size_t i = 0; i < levels_.size(); ++i) {
    const FeatureLevel& l = levels_[i];
    if (l.stride < 1) throw InvalidArgument("feature level stride must be >= 1");
    if (i > 0 && l.stride <= levels_[i - 1].stride) {
      std::ostringstream os;
      os << "feature level strides must strictly increase (level " << i << " has stride "
         << l.stride << " after " << levels_[i - 1].stride << ")";
      throw InvalidArgument(os.str());
    }
  }
  for (size_t i = 0; i < levels_.size(); ++i) {
    const FeatureLevel& l = levels_[i];
    if (l.channels != levels_.front().channels || l.channels < 1) {
      throw DimensionMismatch("feature levels must share a positive channel count");
    }
    const double eh = static_cast<double>(image_height_) / l.stride;
    const double ew = static_cast<double>(image_width_) / l.stride;
    if (std::abs(l.height - eh) > 1.0 || std::abs(l.width - ew) > 1.0 || l.height < 1 ||
        l.width < 1) {
      std::ostringstream os;
      os << "feature level " << i << " is " << l.height << "x" << l.width << ", expected about "
         << eh << "x" << ew << " for stride " << l.stride;
      throw DimensionMismatch(os.str());
    }
    if (l.data.size() != static_cast<size_t>(l.channels) * l.height * l.width) {
      throw DimensionMismatch("feature level data size does not match C*H*W");
    }
  }
}

namespace {

constexpr char kMagic[8] = {'U', 'D', 'O', 'S', 'P', 'Y', 'R', '1'};

void put_u32(std::ostream& os, uint32_t v) {
  const std::array<unsigned char, 4> b{static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                       static_cast<unsigned char>(v >> 16),
                                       static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b.data()), 4);
}

uint32_t get_u32(std::istream& is, const char* what) {
  std::array<unsigned char, 4> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw FormatError(std::string("pyramid file truncated while reading ") + what);
  }
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

}  // namespace

void save_pyramid(const FeaturePyramid& pyramid, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os.write(kMagic, sizeof(kMagic));
  put_u32(os, static_cast<uint32_t>(pyramid.image_height()));
  put_u32(os, static_cast<uint32_t>(pyramid.image_width()));
  put_u32(os, static_cast<uint32_t>(pyramid.levels().size()));
  for (const FeatureLevel& l : pyramid.levels()) {
    put_u32(os, static_cast<uint32_t>(l.stride));
    put_u32(os, static_cast<uint32_t>(l.channels));
    put_u32(os, static_cast<uint32_t>(l.height));
    put_u32(os, static_cast<uint32_t>(l.width));
  }
  for (const FeatureLevel& l : pyramid.levels()) {
    for (float v : l.data) {
      uint32_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      put_u32(os, bits);
    }
  }
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

FeaturePyramid load_pyramid(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw NotFoundError("cannot open pyramid file '" + path.string() + "'");
  char magic[sizeof(kMagic)];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("'" + path.string() + "' is not a pyramid file (bad magic)");
  }
  const uint32_t image_h = get_u32(is, "image height");
  const uint32_t image_w = get_u32(is, "image width");
  const uint32_t count = get_u32(is, "level count");
  if (count == 0 || count > 64) throw FormatError("pyramid level count out of range");
  std::vector<FeatureLevel> levels(count);
  for (FeatureLevel& l : levels) {
    l.stride = static_cast<int>(get_u32(is, "level stride"));
    l.channels = static_cast<int>(get_u32(is, "level channels"));
    l.height = static_cast<int>(get_u32(is, "level height"));
    l.width = static_cast<int>(get_u32(is, "level width"));
    if (l.channels <= 0 || l.height <= 0 || l.width <= 0 || l.channels > 65536 ||
        static_cast<uint64_t>(l.channels) * l.height * l.width > (uint64_t{1} << 31)) {
      throw FormatError("pyramid level shape out of range");
    }
  }
  for (FeatureLevel& l : levels) {
    l.data.resize(static_cast<size_t>(l.channels) * l.height * l.width);
    for (float& v : l.data) {
      const uint32_t bits = get_u32(is, "tensor data");
      std::memcpy(&v, &bits, sizeof(v));
    }
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw FormatError("pyramid file has trailing bytes");
  }
  return FeaturePyramid(static_cast<int>(image_h), static_cast<int>(image_w), std::move(levels));
}

int select_level(const FeaturePyramid& pyramid, const Box& box, const RoiAlignConfig& config) {
  const double scale = std::sqrt(box.w() * box.h());
  const double target =
      std::floor(config.canonical_level + std::log2(scale / config.canonical_size));
  const auto& levels = pyramid.levels();
  const double lo = std::log2(levels.front().stride);
  const double hi = std::log2(levels.back().stride);
  const double clamped = std::clamp(target, lo, hi);
  int best = 0;
  double best_dist = std::abs(std::log2(levels[0].stride) - clamped);
  for (size_t i = 1; i < levels.size(); ++i) {
    const double d = std::abs(std::log2(levels[i].stride) - clamped);
    if (d < best_dist) {
      best = static_cast<int>(i);
      best_dist = d;
    }
  }
  return best;
}

double bilinear_sample(const FeatureLevel& level, int channel, double u, double v) {
  u = std::clamp(u, 0.0, static_cast<double>(level.width - 1));
  v = std::clamp(v, 0.0, static_cast<double>(level.height - 1));
  const int x0 = static_cast<int>(std::floor(u));
  const int y0 = static_cast<int>(std::floor(v));
  const int x1 = std::min(x0 + 1, level.width - 1);
  const int y1 = std::min(y0 + 1, level.height - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  return (1.0 - fy) * ((1.0 - fx) * level.at(channel, y0, x0) + fx * level.at(channel, y0, x1)) +
         fy * ((1.0 - fx) * level.at(channel, y1, x0) + fx * level.at(channel, y1, x1));
}

FeatureVector roi_align(const FeaturePyramid& pyramid, const Box& box,
                        const RoiAlignConfig& config) {
  if (config.grid < 1 || config.samples_per_bin < 1) {
    throw InvalidArgument("roi_align grid and samples_per_bin must be >= 1");
  }
  const std::optional<Box> clipped = box.clipped(pyramid.image_width(), pyramid.image_height());
  if (!clipped) throw InvalidArgument("roi_align box has no area inside the image");
  const FeatureLevel& level = pyramid.levels()[select_level(pyramid, *clipped, config)];
  const CornerBox c = clipped->corners();
  const int g = config.grid;
  const int s = config.samples_per_bin;
  const double bin_w = (c.x2 - c.x1) / g;
  const double bin_h = (c.y2 - c.y1) / g;
  const double inv_stride = 1.0 / level.stride;

  FeatureVector out;
  out.values.assign(static_cast<size_t>(level.channels) * g * g, 0.0);
  const double norm = 1.0 / (s * s);
  for (int by = 0; by < g; ++by) {
    for (int bx = 0; bx < g; ++bx) {
      for (int sy = 0; sy < s; ++sy) {
        const double y = c.y1 + (by + (sy + 0.5) / s) * bin_h;
        const double v = y * inv_stride - 0.5;
        for (int sx = 0; sx < s; ++sx) {
          const double x = c.x1 + (bx + (sx + 0.5) / s) * bin_w;
          const double u = x * inv_stride - 0.5;
          for (int ch = 0; ch < level.channels; ++ch) {
            out.values[(static_cast<size_t>(ch) * g + by) * g + bx] +=
                norm * bilinear_sample(level, ch, u, v);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace udos::features

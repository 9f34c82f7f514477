#pragma once

#include <filesystem>
#include <vector>

#include "udos/maskcore/box.hpp"
#include "udos/maskcore/image.hpp"

namespace udos::features {

// One C x H x W map (channel-first, row-major) sampled every `stride` pixels.
struct FeatureLevel {
  int stride = 1;
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  float at(int c, int y, int x) const {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
  float& at(int c, int y, int x) {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }

  friend bool operator==(const FeatureLevel&, const FeatureLevel&) = default;
};

// Multi-level feature maps over one image. Strides strictly increase, every
// level has the same channel count, and each map is image size / stride
// (within one cell of rounding).
class FeaturePyramid {
 public:
  // Throws InvalidArgument on bad stride order or empty levels,
  // DimensionMismatch on inconsistent shapes.
  FeaturePyramid(int image_height, int image_width, std::vector<FeatureLevel> levels);

  int image_height() const { return image_height_; }
  int image_width() const { return image_width_; }
  int channels() const { return levels_.front().channels; }
  const std::vector<FeatureLevel>& levels() const { return levels_; }

  friend bool operator==(const FeaturePyramid&, const FeaturePyramid&) = default;

 private:
  int image_height_;
  int image_width_;
  std::vector<FeatureLevel> levels_;
};

// Pyramid files: little-endian header
//   "UDOSPYR1", u32 image_height, u32 image_width, u32 level_count,
//   level_count x (u32 stride, u32 C, u32 H, u32 W)
// followed by each level's C*H*W float32 values in the same order.
void save_pyramid(const FeaturePyramid& pyramid, const std::filesystem::path& path);
// FormatError for a bad magic or truncated file; invariant violations
// surface as the FeaturePyramid constructor errors.
FeaturePyramid load_pyramid(const std::filesystem::path& path);

struct HandcraftedConfig {
  std::vector<int> strides{2, 4, 8, 16};
  double smoothing_sigma = 1.0;
  int orientations = 4;
  double color_weight = 1.0;
  double texture_weight = 1.0;
  double position_weight = 1.0;
};

// Channels: smoothed Lab color (L centered, a/b scaled), unsigned gradient
// orientation energy of L, then normalized x and y pixel-center positions in
// [0, 1]. Each level is the block average of the full-resolution features.
FeaturePyramid handcrafted_pyramid(const RgbImage& image, const HandcraftedConfig& config = {});

// Index of the first handcrafted channel of each kind.
inline constexpr int kColorChannel = 0;
inline constexpr int kGradientChannel = 3;
inline int position_channel(const HandcraftedConfig& config) {
  return kGradientChannel + config.orientations;
}

struct FeatureVector {
  std::vector<double> values;
  size_t dim() const { return values.size(); }
};

struct RoiAlignConfig {
  int grid = 7;
  int samples_per_bin = 2;
  double canonical_size = 224.0;
  int canonical_level = 4;
};

// Level whose log2(stride) is nearest to
// clamp(floor(canonical_level + log2(sqrt(w*h) / canonical_size))).
int select_level(const FeaturePyramid& pyramid, const Box& box, const RoiAlignConfig& config);

// Bilinear interpolation at continuous cell coordinates (u = column,
// v = row), clamped to the map.
double bilinear_sample(const FeatureLevel& level, int channel, double u, double v);

// Average of bilinear samples on a grid x grid layout of bins. Pixel (i, j)
// has its center at (j + 0.5, i + 0.5) in image coordinates. Output is
// channel-major with dim = C * grid * grid. Throws InvalidArgument when the
// box has no area inside the image.
FeatureVector roi_align(const FeaturePyramid& pyramid, const Box& box,
                        const RoiAlignConfig& config = {});

}  // namespace udos::features

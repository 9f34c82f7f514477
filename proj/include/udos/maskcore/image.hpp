#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace udos {

// 8-bit RGB raster, row-major, channels interleaved.
struct RgbImage {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int h, int w, uint8_t fill = 0)
      : height(h), width(w), pixels(static_cast<size_t>(h) * w * 3, fill) {}

  bool empty() const { return height <= 0 || width <= 0; }

  uint8_t& at(int y, int x, int c) {
    return pixels[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  uint8_t at(int y, int x, int c) const {
    return pixels[(static_cast<size_t>(y) * width + x) * 3 + c];
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

// Separable Gaussian smoothing of an interleaved 3-channel float raster with
// border replication. Kernel radius is ceil(4 * sigma). Returns a copy when
// sigma == 0.
std::vector<float> gaussian_smooth(const std::vector<float>& rgb, int height, int width,
                                   double sigma);

}  // namespace udos

#include "udos/maskcore/image.hpp"

#include <algorithm>
#include <cmath>

namespace udos {

std::vector<float> gaussian_smooth(const std::vector<float>& rgb, int height, int width,
                                   double sigma) {
  if (sigma <= 0.0) return rgb;
  const int len = static_cast<int>(std::ceil(sigma * 4.0)) + 1;
  std::vector<float> kernel(len);
  for (int i = 0; i < len; ++i) {
    kernel[i] = static_cast<float>(std::exp(-0.5 * (i / sigma) * (i / sigma)));
  }
  float sum = 0.0f;
  for (int i = 1; i < len; ++i) sum += kernel[i];
  sum = 2.0f * sum + kernel[0];
  for (float& k : kernel) k /= sum;

  std::vector<float> tmp(rgb.size());
  std::vector<float> out(rgb.size());
  auto idx = [width](int y, int x, int c) {
    return (static_cast<size_t>(y) * width + x) * 3 + c;
  };
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        float s = kernel[0] * rgb[idx(y, x, c)];
        for (int i = 1; i < len; ++i) {
          s += kernel[i] * (rgb[idx(y, std::max(x - i, 0), c)] +
                            rgb[idx(y, std::min(x + i, width - 1), c)]);
        }
        tmp[idx(y, x, c)] = s;
      }
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        float s = kernel[0] * tmp[idx(y, x, c)];
        for (int i = 1; i < len; ++i) {
          s += kernel[i] * (tmp[idx(std::max(y - i, 0), x, c)] +
                            tmp[idx(std::min(y + i, height - 1), x, c)]);
        }
        out[idx(y, x, c)] = s;
      }
    }
  }
  return out;
}

}  // namespace udos

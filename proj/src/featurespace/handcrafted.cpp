#include <algorithm>
#include <cmath>
#include <numbers>

#include "udos/featurespace/pyramid.hpp"
#include "udos/maskcore/error.hpp"

namespace udos::features {

namespace {

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double kDelta = 6.0 / 29.0;
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

// sRGB in [0, 1] to CIE Lab under D65.
std::array<double, 3> rgb_to_lab(double r, double g, double b) {
  r = srgb_to_linear(r);
  g = srgb_to_linear(g);
  b = srgb_to_linear(b);
  const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
  const double fx = lab_f(x), fy = lab_f(y), fz = lab_f(z);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

}  // namespace

FeaturePyramid handcrafted_pyramid(const RgbImage& image, const HandcraftedConfig& config) {
  if (image.empty()) throw InvalidArgument("handcrafted_pyramid needs a nonempty image");
  if (config.strides.empty()) throw InvalidArgument("handcrafted_pyramid needs strides");
  if (config.orientations < 1) throw InvalidArgument("orientations must be >= 1");
  const int h = image.height;
  const int w = image.width;
  const int channels = position_channel(config) + 2;
  const size_t plane = static_cast<size_t>(h) * w;

  std::vector<float> rgb(image.pixels.size());
  for (size_t i = 0; i < rgb.size(); ++i) rgb[i] = image.pixels[i] / 255.0f;
  const std::vector<float> smooth =
      gaussian_smooth(rgb, h, w, config.smoothing_sigma);

  std::vector<float> full(static_cast<size_t>(channels) * plane, 0.0f);
  std::vector<double> lightness(plane);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t p = static_cast<size_t>(y) * w + x;
      const auto lab = rgb_to_lab(smooth[p * 3], smooth[p * 3 + 1], smooth[p * 3 + 2]);
      lightness[p] = lab[0] / 100.0;
      full[0 * plane + p] = static_cast<float>(config.color_weight * (lab[0] - 50.0) / 50.0);
      full[1 * plane + p] = static_cast<float>(config.color_weight * lab[1] / 50.0);
      full[2 * plane + p] = static_cast<float>(config.color_weight * lab[2] / 50.0);
      const int pc = position_channel(config);
      full[pc * plane + p] = static_cast<float>(config.position_weight * (x + 0.5) / w);
      full[(pc + 1) * plane + p] = static_cast<float>(config.position_weight * (y + 0.5) / h);
    }
  }

  // Gradient energy of L split over unsigned orientations in [0, pi), with
  // linear interpolation between the two nearest orientation bins.
  const int n_orient = config.orientations;
  auto light = [&](int y, int x) {
    return lightness[static_cast<size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = (light(y, x + 1) - light(y, x - 1)) / 2.0;
      const double dy = (light(y + 1, x) - light(y - 1, x)) / 2.0;
      const double mag = std::hypot(dx, dy);
      if (mag == 0.0) continue;
      double theta = std::atan2(dy, dx);
      if (theta < 0) theta += std::numbers::pi;
      const double pos = theta / std::numbers::pi * n_orient;
      const int o0 = static_cast<int>(std::floor(pos)) % n_orient;
      const int o1 = (o0 + 1) % n_orient;
      const double frac = pos - std::floor(pos);
      const size_t p = static_cast<size_t>(y) * w + x;
      const double scaled = config.texture_weight * mag * 4.0;
      full[(kGradientChannel + o0) * plane + p] += static_cast<float>(scaled * (1.0 - frac));
      full[(kGradientChannel + o1) * plane + p] += static_cast<float>(scaled * frac);
    }
  }

  std::vector<FeatureLevel> levels;
  for (int stride : config.strides) {
    FeatureLevel l;
    l.stride = stride;
    l.channels = channels;
    l.height = (h + stride - 1) / stride;
    l.width = (w + stride - 1) / stride;
    l.data.assign(static_cast<size_t>(channels) * l.height * l.width, 0.0f);
    for (int c = 0; c < channels; ++c) {
      for (int cy = 0; cy < l.height; ++cy) {
        for (int cx = 0; cx < l.width; ++cx) {
          double sum = 0.0;
          int n = 0;
          for (int y = cy * stride; y < std::min(h, (cy + 1) * stride); ++y) {
            for (int x = cx * stride; x < std::min(w, (cx + 1) * stride); ++x) {
              sum += full[c * plane + static_cast<size_t>(y) * w + x];
              ++n;
            }
          }
          l.at(c, cy, cx) = static_cast<float>(sum / n);
        }
      }
    }
    levels.push_back(std::move(l));
  }
  return FeaturePyramid(h, w, std::move(levels));
}

}  // namespace udos::features

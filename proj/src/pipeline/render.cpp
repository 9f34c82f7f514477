#include "udos/pipeline/render.hpp"

#include <string>

#include "udos/maskcore/error.hpp"

namespace udos::pipeline {

namespace {

// Rows of each digit, 3 bits per row, most significant bit leftmost.
constexpr uint8_t kDigits[10][5] = {
    {7, 5, 5, 5, 7}, {2, 6, 2, 2, 7}, {7, 1, 7, 4, 7}, {7, 1, 7, 1, 7}, {5, 5, 7, 1, 1},
    {7, 4, 7, 1, 7}, {7, 4, 7, 5, 7}, {7, 1, 1, 1, 1}, {7, 5, 7, 5, 7}, {7, 5, 7, 1, 7}};

constexpr uint8_t kPalette[12][3] = {
    {230, 25, 75},  {60, 180, 75},  {255, 225, 25}, {0, 130, 200},  {245, 130, 48}, {145, 30, 180},
    {70, 240, 240}, {240, 50, 230}, {210, 245, 60}, {250, 190, 190}, {0, 128, 128}, {170, 110, 40}};

void put(RgbImage& img, int y, int x, const uint8_t* c) {
  if (y < 0 || x < 0 || y >= img.height || x >= img.width) return;
  for (int k = 0; k < 3; ++k) img.at(y, x, k) = c[k];
}

void stamp_number(RgbImage& img, int y0, int x0, int value) {
  static const uint8_t kInk[3] = {255, 255, 255};
  static const uint8_t kShadow[3] = {0, 0, 0};
  const std::string text = std::to_string(value);
  for (size_t d = 0; d < text.size(); ++d) {
    const uint8_t* rows = kDigits[text[d] - '0'];
    const int left = x0 + static_cast<int>(d) * 4;
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (rows[r] & (4 >> c)) {
          put(img, y0 + r + 1, left + c + 1, kShadow);
          put(img, y0 + r, left + c, kInk);
        }
      }
    }
  }
}

}  // namespace

Overlay render_overlay(const RgbImage& image, const std::vector<OverlayItem>& items) {
  Overlay out{image, items.empty()};
  const int h = image.height, w = image.width;
  for (size_t i = 0; i < items.size(); ++i) {
    const BinaryMask& m = items[i].mask;
    if (m.height() != h || m.width() != w) {
      throw DimensionMismatch("overlay mask " + std::to_string(i) + " does not match the image size");
    }
    const uint8_t* color = kPalette[i % 12];
    const std::vector<uint8_t> dense = m.to_dense();
    const auto inside = [&](int y, int x) {
      return y >= 0 && x >= 0 && y < h && x < w && dense[static_cast<size_t>(y) * w + x];
    };
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!inside(y, x)) continue;
        const bool edge = !inside(y - 1, x) || !inside(y + 1, x) || !inside(y, x - 1) || !inside(y, x + 1);
        for (int k = 0; k < 3; ++k) {
          uint8_t& p = out.image.at(y, x, k);
          p = edge ? color[k] : static_cast<uint8_t>((p + color[k] + 1) / 2);
        }
      }
    }
  }
  for (const auto& item : items) {
    if (item.label < 0) continue;
    if (auto box = item.mask.tight_box()) {
      const CornerBox c = box->corners();
      stamp_number(out.image, static_cast<int>(c.y1) + 1, static_cast<int>(c.x1) + 1, item.label);
    }
  }
  return out;
}

}  // namespace udos::pipeline

#pragma once

#include <vector>

#include "udos/maskcore/image.hpp"
#include "udos/maskcore/mask.hpp"

namespace udos::pipeline {

struct OverlayItem {
  BinaryMask mask;
  int label = -1;  // drawn at the mask's top-left corner when >= 0
};

struct Overlay {
  RgbImage image;
  bool empty_input = false;  // no items: image returned unchanged
};

// Tints each mask with a per-index palette color at 50% opacity, outlines it
// and stamps its label in a 3x5 digit font. Items are drawn in order, so
// later items sit on top. Throws DimensionMismatch for masks of another size.
Overlay render_overlay(const RgbImage& image, const std::vector<OverlayItem>& items);

}  // namespace udos::pipeline

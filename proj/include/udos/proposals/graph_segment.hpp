#pragma once

#include <cstdint>
#include <vector>

#include "udos/maskcore/image.hpp"
#include "udos/maskcore/mask.hpp"

namespace udos::proposals {

struct SegParams {
  double scale_k = 50.0;  // merge threshold constant k
  double sigma = 0.8;     // Gaussian pre-smoothing, 0 disables
  int min_size = 20;      // component floor in pixels

  // Throws InvalidArgument on out-of-range values.
  void validate() const;
};

// Per-pixel component ids, row-major. Ids are dense, numbered by first
// appearance in a row-major scan.
struct LabelMap {
  int height = 0;
  int width = 0;
  int num_regions = 0;
  std::vector<int32_t> labels;
  std::vector<int64_t> sizes;  // pixel count per id

  int32_t at(int y, int x) const { return labels[static_cast<size_t>(y) * width + x]; }

  // Foreground = pixels whose label is marked in `selected` (indexed by id).
  BinaryMask mask_of(const std::vector<uint8_t>& selected) const;
  BinaryMask mask_of(int32_t id) const;
};

// Graph-based segmentation on the 8-connected pixel grid. Edge weight is
// the Euclidean RGB distance (0..255 scale) after smoothing; components C1,
// C2 merge when w <= min(Int(C1) + k/|C1|, Int(C2) + k/|C2|). Components
// below min_size are then absorbed along the sorted edges. Equal weights are
// processed in edge-index order, so the result is deterministic.
LabelMap graph_segment(const RgbImage& image, const SegParams& params);

}  // namespace udos::proposals

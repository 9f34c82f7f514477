#include "udos/proposals/grid.hpp"

#include <algorithm>

#include "udos/maskcore/error.hpp"

namespace udos::proposals {

std::vector<Proposal> grid_proposals(int image_height, int image_width, int cell) {
  if (cell < 1) throw InvalidArgument("grid cell size must be >= 1");
  if (image_height < 1 || image_width < 1) {
    throw InvalidArgument("grid proposals need a nonempty image");
  }
  std::vector<Proposal> out;
  for (int y = 0; y < image_height; y += cell) {
    for (int x = 0; x < image_width; x += cell) {
      const int x2 = std::min(x + cell, image_width);
      const int y2 = std::min(y + cell, image_height);
      out.push_back(proposal_from_mask(
          BinaryMask::from_rect(image_height, image_width, x, y, x2, y2),
          Provenance::kUnsupervised));
    }
  }
  return out;
}

}  // namespace udos::proposals

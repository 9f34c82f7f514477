#pragma once

#include <vector>

#include "udos/maskcore/proposal.hpp"

namespace udos::proposals {

// Non-overlapping cell x cell squares tiling the image in row-major order;
// right and bottom cells are clipped.
std::vector<Proposal> grid_proposals(int image_height, int image_width, int cell);

}  // namespace udos::proposals

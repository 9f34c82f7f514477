#pragma once

#include <span>
#include <vector>

#include "udos/maskcore/proposal.hpp"

namespace udos::ranking {

enum class DedupMode { kMask, kBox };

struct RankConfig {
  int top_k = 100;
  double dedup_iou = 0.95;  // suppress when IoU with a kept proposal exceeds this
  DedupMode dedup = DedupMode::kMask;

  void validate() const;
};

// Cube root of c * b * m. Throws InvalidArgument unless each lies in [0, 1].
double fuse_score(double c, double b, double m);
double fuse_score(const Proposal& p);

struct RankedProposal {
  Proposal proposal;
  double score = 0.0;
};

// Sort by fused score descending; ties by larger mask area, then by box
// corners, then by the mask's RLE counts, then by input order. Greedy
// suppression against the kept set, truncated to top_k.
std::vector<RankedProposal> rank(std::span<const Proposal> proposals, const RankConfig& config);

}  // namespace udos::ranking

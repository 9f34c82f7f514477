#pragma once

#include <span>
#include <vector>

#include "udos/featurespace/pyramid.hpp"
#include "udos/maskcore/proposal.hpp"

namespace udos::grouping {

struct GroupingConfig {
  double delta = 0.1;          // box expansion factor, 0 <= delta < 1
  double tau = 0.5;            // affinity threshold for clustering
  bool keep_originals = true;  // emit parts alongside merged proposals
  // Replace part classification scores by the cohesion surrogate (see
  // cohesion_score). Off when parts arrive with externally predicted scores.
  bool cohesion_scores = true;
  features::RoiAlignConfig roi;

  void validate() const;
};

// Width and height scaled by (1 + delta) about the center, then clipped to
// the image. Throws InvalidArgument for delta outside [0, 1) or a box with
// no area inside the image.
Box expand_box(const Box& box, double delta, int image_width, int image_height);

// Dense symmetric n x n matrix.
struct AffinityMatrix {
  int n = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<size_t>(i) * n + j]; }
  double& at(int i, int j) { return values[static_cast<size_t>(i) * n + j]; }
};

// Cosine similarity of every pair; the diagonal is exactly 1. Throws
// DimensionMismatch on mixed dims and InvalidArgument (naming the index) on
// a zero-norm vector.
AffinityMatrix pairwise_affinity(std::span<const features::FeatureVector> features);

struct Clustering {
  // Partition of 0..n-1. Members ascending; groups ordered by first member.
  std::vector<std::vector<int>> groups;
  // Average shifted affinity of each merge, in merge order.
  std::vector<double> merge_heights;
};

// Greedy average-linkage agglomeration on (affinity - tau): merge the pair of
// clusters with the largest mean shifted affinity while it is positive. Ties
// go to the lexicographically smallest pair of cluster representatives (a
// cluster is represented by its smallest member). Throws InvalidArgument on
// an asymmetric matrix or a non-unit diagonal.
Clustering cluster(const AffinityMatrix& affinity, double tau);

// Sum over groups of sum_{i<j in group} (affinity(i, j) - tau).
double partition_objective(const AffinityMatrix& affinity, double tau,
                           const std::vector<std::vector<int>>& groups);

// Classification-score surrogate for a group: the mean pairwise affinity
// shifted by tau and mapped linearly from [-1 - tau, 1 - tau] onto [0, 1].
// A singleton has no pairs and scores as shift 0, i.e. (1 + tau) / 2.
double cohesion_score(const AffinityMatrix& affinity, double tau, std::span<const int> group);

// One Grouped proposal per multi-member group: union mask, its tight box and
// the member-wise maximum of each score component. Singleton groups add
// nothing. With keep_originals the result is parts ++ merged; otherwise each
// group contributes its merged proposal, or its single member.
std::vector<Proposal> merge_groups(std::span<const Proposal> parts,
                                   const std::vector<std::vector<int>>& groups,
                                   bool keep_originals);

struct PartitionResult {
  std::vector<std::vector<int>> groups;
  std::vector<Proposal> merged;    // Grouped proposals, in group order
  std::vector<Proposal> output;    // merge_groups output
  std::vector<int> output_group;   // group index of each output entry
  AffinityMatrix affinity;
  std::vector<double> merge_heights;
};

// expand_box -> roi_align -> pairwise_affinity -> cluster -> merge_groups.
PartitionResult group_pipeline(std::span<const Proposal> parts,
                               const features::FeaturePyramid& pyramid,
                               const GroupingConfig& config);

}  // namespace udos::grouping

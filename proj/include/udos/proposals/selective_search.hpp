#pragma once

#include <array>
#include <vector>

#include "udos/maskcore/image.hpp"
#include "udos/maskcore/proposal.hpp"
#include "udos/proposals/graph_segment.hpp"

namespace udos::proposals {

inline constexpr int kColorBins = 25;
inline constexpr int kTextureOrientations = 8;
inline constexpr int kTextureBins = 10;
inline constexpr int kColorHistSize = 3 * kColorBins;
inline constexpr int kTextureHistSize = 3 * kTextureOrientations * kTextureBins;

// Relative weights of the four region similarity terms. They are normalized
// by their sum, so (1, 1, 1, 1) averages the terms.
struct SimilarityWeights {
  double color = 1.0;
  double texture = 1.0;
  double size = 1.0;
  double fill = 1.0;

  void validate() const;
};

struct Region {
  int id = 0;
  int64_t pixel_count = 0;
  std::vector<double> color_hist;    // kColorHistSize, sums to 1
  std::vector<double> texture_hist;  // kTextureHistSize, sums to 1
  Box box{0.5, 0.5, 1, 1};
  std::vector<int> neighbors;        // sorted ids
};

// Histogram intersection.
double color_similarity(const Region& a, const Region& b);
double texture_similarity(const Region& a, const Region& b);
// 1 - (|a| + |b|) / image_area
double size_similarity(const Region& a, const Region& b, int64_t image_area);
// 1 - (|hull box| - |a| - |b|) / image_area
double fill_similarity(const Region& a, const Region& b, int64_t image_area);
double region_similarity(const Region& a, const Region& b, int64_t image_area,
                         const SimilarityWeights& weights);

// Full merge tree over the base segmentation. Regions [0, num_initial) are the
// graph_segment components; region num_initial + i is produced by merges[i].
struct Hierarchy {
  LabelMap base;
  int num_initial = 0;
  std::vector<Region> regions;
  std::vector<std::array<int, 2>> merges;
  std::vector<double> merge_similarity;

  // Initial ids covered by a region.
  std::vector<int> leaves(int region) const;
  BinaryMask mask(int region) const;
};

// Initial regions with color/texture histograms and adjacency (4-connected).
std::vector<Region> initial_regions(const RgbImage& image, const LabelMap& labels);

// Repeatedly merges the most similar adjacent pair (ties: smallest id pair)
// until no adjacent pair is left.
Hierarchy build_hierarchy(const RgbImage& image, const SegParams& params,
                          const SimilarityWeights& weights);

struct SelectiveSearchConfig {
  // One run per entry, outputs concatenated. Default is a single strategy.
  std::vector<SegParams> strategies{SegParams{}};
  SimilarityWeights weights;
};

// Every initial and merged region as an Unsupervised proposal, deduplicated by
// exact box equality (first occurrence kept).
std::vector<Proposal> selective_search(const RgbImage& image, const SegParams& params,
                                       const SimilarityWeights& weights = {});
std::vector<Proposal> selective_search(const RgbImage& image,
                                       const SelectiveSearchConfig& config);

// One proposal per graph_segment component.
std::vector<Proposal> segment_proposals(const RgbImage& image, const SegParams& params);

}  // namespace udos::proposals

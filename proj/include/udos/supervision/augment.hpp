#pragma once

#include <cstdint>
#include <map>

#include "udos/maskcore/coco.hpp"
#include "udos/maskcore/proposal.hpp"

namespace udos::supervision {

struct AugmentationConfig {
  double iou_exclude_threshold = 0.9;  // exclude u when mask IoU with some s exceeds this

  void validate() const;
};

// S followed by every u whose mask IoU with each s is <= the threshold, in
// input order. Entries keep their provenance. U is not deduplicated against
// itself. Throws DimensionMismatch when masks differ in size.
LabelSet augment_labels(const LabelSet& gt, const LabelSet& unsup, const AugmentationConfig& config);

// Per-image augment_labels over a dataset. Surviving unsupervised masks become
// annotations with fresh ids after the existing ones; images without an entry
// in unsup are copied unchanged. Throws UnknownImageError for unsup keys that
// are not dataset images.
CocoDataset augment_dataset(const CocoDataset& gt, const std::map<int64_t, LabelSet>& unsup,
                            const AugmentationConfig& config);

}  // namespace udos::supervision

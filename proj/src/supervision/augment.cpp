#include "udos/supervision/augment.hpp"

#include <algorithm>
#include <sstream>

#include "udos/maskcore/error.hpp"

namespace udos::supervision {

void AugmentationConfig::validate() const {
  if (!(iou_exclude_threshold >= 0.0 && iou_exclude_threshold <= 1.0)) {
    throw InvalidArgument("iou_exclude_threshold must lie in [0, 1]");
  }
}

LabelSet augment_labels(const LabelSet& gt, const LabelSet& unsup, const AugmentationConfig& config) {
  config.validate();
  const std::vector<Proposal>* all[] = {&gt.entries, &unsup.entries};
  const BinaryMask* first = nullptr;
  for (const auto* set : all) {
    for (const auto& p : *set) {
      if (!first) first = &p.mask;
      if (p.mask.height() != first->height() || p.mask.width() != first->width()) {
        std::ostringstream os;
        os << "label masks differ in size: " << first->height() << "x" << first->width() << " vs "
           << p.mask.height() << "x" << p.mask.width();
        throw DimensionMismatch(os.str());
      }
    }
  }

  LabelSet out{gt.entries};
  for (const auto& u : unsup.entries) {
    const bool duplicate = std::any_of(gt.entries.begin(), gt.entries.end(), [&](const Proposal& s) {
      return mask_iou(u.mask, s.mask) > config.iou_exclude_threshold;
    });
    if (!duplicate) out.entries.push_back(u);
  }
  return out;
}

CocoDataset augment_dataset(const CocoDataset& gt, const std::map<int64_t, LabelSet>& unsup,
                            const AugmentationConfig& config) {
  config.validate();
  std::vector<int64_t> unknown;
  for (const auto& [id, labels] : unsup) {
    if (!gt.find_image(id)) unknown.push_back(id);
  }
  if (!unknown.empty()) {
    std::ostringstream os;
    os << "proposals reference unknown image ids:";
    for (int64_t id : unknown) os << ' ' << id;
    throw UnknownImageError(os.str());
  }

  CocoDataset out = gt;
  int64_t next_id = 1;
  for (const auto& a : gt.annotations) next_id = std::max(next_id, a.id + 1);
  for (const auto& image : gt.images) {
    auto it = unsup.find(image.id);
    if (it == unsup.end()) continue;
    for (const auto& p : it->second.entries) {
      if (p.mask.height() != image.height || p.mask.width() != image.width) {
        std::ostringstream os;
        os << "proposal mask " << p.mask.height() << "x" << p.mask.width() << " does not match image "
           << image.id << " (" << image.height << "x" << image.width << ")";
        throw DimensionMismatch(os.str());
      }
    }
    const LabelSet s = labels_for_image(gt, image.id);
    const LabelSet a = augment_labels(s, it->second, config);
    for (size_t k = s.entries.size(); k < a.entries.size(); ++k) {
      const Proposal& p = a.entries[k];
      out.annotations.push_back(CocoAnnotation{next_id++, image.id, p.box, p.mask, false, p.provenance});
    }
  }
  return out;
}

}  // namespace udos::supervision

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "udos/maskcore/box.hpp"
#include "udos/maskcore/mask.hpp"
#include "udos/maskcore/proposal.hpp"

namespace udos {

inline constexpr int kSchemaVersion = 1;

struct CocoImage {
  int64_t id = 0;
  std::string file_name;
  int height = 0;
  int width = 0;

  friend bool operator==(const CocoImage&, const CocoImage&) = default;
};

// Class-agnostic: category_id is always 1 on write. ignore annotations
// (including iscrowd) may be matched but are not counted as ground truth.
struct CocoAnnotation {
  int64_t id = 0;
  int64_t image_id = 0;
  Box box;
  BinaryMask mask;
  bool ignore = false;
  Provenance provenance = Provenance::kGroundTruth;

  friend bool operator==(const CocoAnnotation&, const CocoAnnotation&) = default;
};

struct CocoDataset {
  std::vector<CocoImage> images;
  std::vector<CocoAnnotation> annotations;

  const CocoImage* find_image(int64_t id) const;
  friend bool operator==(const CocoDataset&, const CocoDataset&) = default;
};

// Segmentations are RLE only; polygon segmentations raise SchemaError.
// Annotation masks must match their image size (DimensionMismatch).
nlohmann::json dataset_to_json(const CocoDataset& dataset);
CocoDataset dataset_from_json(const nlohmann::json& j);

// Annotations of one image as ground-truth proposals.
LabelSet labels_for_image(const CocoDataset& dataset, int64_t image_id);

struct CocoResult {
  int64_t image_id = 0;
  Box box;
  BinaryMask mask;
  double score = 0.0;

  friend bool operator==(const CocoResult&, const CocoResult&) = default;
};

// {"schema_version": 1, "results": [{image_id, category_id, bbox,
// segmentation, score}, ...]}. Reading also accepts a bare result array.
nlohmann::json results_to_json(const std::vector<CocoResult>& results);
std::vector<CocoResult> results_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
// Writes j.dump(indent) plus a trailing newline.
void write_json_file(const std::string& path, const nlohmann::json& j, int indent = -1);

}  // namespace udos

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "udos/maskcore/coco.hpp"

namespace udos::evaluation {

enum class IouKind { kBox, kMask };

std::string_view iou_kind_name(IouKind kind);
// Throws InvalidArgument for names other than "box" and "mask".
IouKind parse_iou_kind(std::string_view name);

inline constexpr int kNumThresholds = 10;
// 0.50, 0.55, ..., 0.95, each the double nearest to the decimal value.
const std::array<double, kNumThresholds>& iou_thresholds();

struct KindReport {
  std::map<int, double> ar;                                    // K -> AR
  std::map<int, std::array<double, kNumThresholds>> recall;   // K -> recall per threshold
  std::map<int, std::array<int64_t, kNumThresholds>> matched;  // K -> matched GT per threshold
};

struct EvalReport {
  int64_t num_images = 0;
  int64_t num_gt = 0;  // excludes ignore annotations
  int64_t num_predictions = 0;
  std::vector<int> ks;
  std::optional<KindReport> box;
  std::optional<KindReport> mask;
};

// Predictions must be ordered by score descending within each image
// (UnsortedError otherwise) and reference only images of gt
// (UnknownImageError listing the ids otherwise). Per image and threshold the
// top-K predictions are matched greedily in score order, each to the
// unmatched counted GT of highest IoU (lowest index on ties) with
// IoU >= t; failing that a prediction may match an ignore GT, which is not
// counted. Recall pools matched GT over the dataset.
EvalReport evaluate(const CocoDataset& gt, std::span<const CocoResult> predictions,
                    std::span<const int> ks, IouKind kind);
// Box and mask reports together.
EvalReport evaluate_all(const CocoDataset& gt, std::span<const CocoResult> predictions,
                        std::span<const int> ks);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

// Fixed-width AR table: one row per kind, one column per K.
std::string report_table(const EvalReport& report);

}  // namespace udos::evaluation

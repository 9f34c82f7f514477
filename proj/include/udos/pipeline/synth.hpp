#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "udos/maskcore/coco.hpp"
#include "udos/maskcore/image.hpp"
#include "udos/maskcore/mask.hpp"

namespace udos::pipeline {

enum class ShapeKind { kRectangle, kEllipse, kTriangle };

std::string_view shape_name(ShapeKind kind);
// Rectangles are the annotated ("seen") class; the others are held out.
inline bool is_seen(ShapeKind kind) { return kind == ShapeKind::kRectangle; }

struct SynthConfig {
  int num_scenes = 20;
  int height = 128;
  int width = 128;
  int min_objects = 2;
  int max_objects = 5;
  int min_size = 20;  // bounding extent of a shape, pixels
  int max_size = 48;
  // Hue difference between the two parts of a shape, degrees.
  double part_hue_shift_min = 18.0;
  double part_hue_shift_max = 40.0;
  double noise_sigma = 4.0;  // per-channel pixel noise
  // Thin unannotated bars painted over everything, splitting shapes into
  // disconnected visible pieces.
  int max_occluders = 0;
  double occluder_width_min = 2.0;
  double occluder_width_max = 4.0;
  uint64_t seed = 0;

  void validate() const;
};

struct SynthObject {
  ShapeKind kind;
  BinaryMask mask;       // visible pixels after occlusion
  bool ignore = false;   // mostly occluded; matchable but not counted
};

struct SynthScene {
  RgbImage image;
  std::vector<SynthObject> objects;
};

// Noisy two-color gradient background with shaded two-tone shapes painted
// in order, then up to max_occluders straight bars across the image. Each
// shape is split by a line through its center into two parts of related hue.
// Ground truth masks are the visible pixels; shapes left with less than half
// their area are flagged ignore. Deterministic in (config.seed, index).
SynthScene generate_scene(const SynthConfig& config, int index);

struct SynthDataset {
  CocoDataset all;
  CocoDataset seen;
  CocoDataset unseen;
};

// Writes images/scene_NNNN.png plus gt_all.json, gt_seen.json and
// gt_unseen.json under dir. Image ids run from 1 in scene order.
SynthDataset write_synthetic_dataset(const std::filesystem::path& dir, const SynthConfig& config);

}  // namespace udos::pipeline

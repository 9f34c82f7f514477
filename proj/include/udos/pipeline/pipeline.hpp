#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "udos/evaluation/evaluation.hpp"
#include "udos/featurespace/pyramid.hpp"
#include "udos/grouping/grouping.hpp"
#include "udos/pipeline/artifacts.hpp"
#include "udos/pipeline/audit.hpp"
#include "udos/proposals/graph_segment.hpp"
#include "udos/ranking/ranking.hpp"
#include "udos/supervision/augment.hpp"

namespace udos::pipeline {

enum class ProposalAlgo { kSelectiveSearch, kSegments, kGrid };

std::string_view algo_name(ProposalAlgo algo);
// "selsearch", "fzs" or "grid"; InvalidArgument otherwise.
ProposalAlgo parse_algo(std::string_view name);

struct ProposeConfig {
  ProposalAlgo algo = ProposalAlgo::kSelectiveSearch;
  proposals::SegParams seg;
  int grid_cell = 32;

  void validate() const;
};

// Unsupervised proposals of one image.
ImageProposals propose_image(const RgbImage& image, const CocoImage& info, const ProposeConfig& config);

// Images to process: the dataset's image list when given, otherwise every
// PNG/PPM in dir sorted by name with ids 1..N.
std::vector<CocoImage> list_images(const std::filesystem::path& dir, const CocoDataset* dataset,
                                   FileAudit& audit);

ProposalFile propose_dir(const std::filesystem::path& image_dir, const std::vector<CocoImage>& images,
                         const ProposeConfig& config, int workers, FileAudit& audit);

// "handcrafted" computes features from the image. "tensor:PATH" loads a
// saved pyramid: PATH itself when it is a file, else PATH/<image stem>.pyr.
struct FeatureSource {
  std::string provider = "handcrafted";
  features::HandcraftedConfig handcrafted;

  void validate() const;
  features::FeaturePyramid load(const std::filesystem::path& image_dir, const CocoImage& image,
                                FileAudit& audit) const;
  features::FeaturePyramid from_image(const RgbImage& image, const CocoImage& info,
                                      FileAudit& audit) const;
};

// Parts become group_pipeline output with group ids; every proposal is
// retagged Part or Grouped.
ImageProposals group_image(const ImageProposals& parts, const features::FeaturePyramid& pyramid,
                           const grouping::GroupingConfig& config, bool dump_affinity);

ProposalFile group_file(const ProposalFile& parts, const FeatureSource& features,
                        const grouping::GroupingConfig& config, bool dump_affinity, int workers,
                        FileAudit& audit);

// Ranked results of every image, images in file order.
std::vector<CocoResult> rank_image(const ImageProposals& proposals, const ranking::RankConfig& config);
std::vector<CocoResult> rank_file(const ProposalFile& file, const ranking::RankConfig& config);

enum class Mode { kTrain, kInference, kBoth };
std::string_view mode_name(Mode mode);
Mode parse_mode(std::string_view name);

// Mirrors the command-line flags of the pipeline subcommand one to one.
struct PipelineConfig {
  Mode mode = Mode::kBoth;
  std::string images;   // image directory
  std::string gt;       // evaluation ground truth, optional
  std::string seen_gt;  // labeled set S for augmentation, optional
  std::string parts;    // precomputed part proposals for inference, optional
  std::string out = "udos_out";
  ProposeConfig propose;
  FeatureSource features;
  bool group = true;
  grouping::GroupingConfig grouping;
  ranking::RankConfig rank{300};
  supervision::AugmentationConfig augment;
  std::vector<int> ks{100, 300};
  int workers = 1;
  uint64_t seed = 0;
  bool render = false;
  bool dump_affinity = false;

  // Range checks plus existence of every referenced input path.
  void validate() const;
};

struct PipelineResult {
  std::optional<evaluation::EvalReport> report;
  std::vector<std::string> warnings;
};

// Train: propose -> proposals.json, then augment with seen_gt ->
// augmented.json. Inference: parts (from the parts file, or proposed in
// memory) -> [group -> grouped.json] -> rank -> results.json -> [eval ->
// eval.json, eval.txt] -> [overlays/]. Inference never reads train outputs.
PipelineResult run_pipeline(const PipelineConfig& config, FileAudit& audit);

}  // namespace udos::pipeline

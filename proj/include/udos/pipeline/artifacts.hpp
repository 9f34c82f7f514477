#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "udos/grouping/grouping.hpp"
#include "udos/maskcore/coco.hpp"
#include "udos/maskcore/proposal.hpp"

namespace udos::pipeline {

// Proposals of one image. group_ids and groups are filled by the grouping
// stage; affinity only when requested.
struct ImageProposals {
  CocoImage image;
  std::vector<Proposal> proposals;
  std::vector<int> group_ids;
  std::vector<std::vector<int>> groups;
  std::optional<grouping::AffinityMatrix> affinity;
};

// kind is "proposals" (unsupervised or part proposals) or "grouped".
// image_dir locates the rasters named by each image's file_name.
struct ProposalFile {
  std::string kind = "proposals";
  std::string image_dir;
  std::vector<ImageProposals> images;
};

// {"schema_version": 1, "kind": ..., "image_dir": ..., "images": [{"image_id",
// "file_name", "height", "width", "proposals": [{"bbox", "segmentation",
// "score_c", "score_b", "score_m", "provenance"[, "group"]}][, "groups"]
// [, "affinity"]}]}
nlohmann::json proposal_file_to_json(const ProposalFile& file);
ProposalFile proposal_file_from_json(const nlohmann::json& j);

// Unsupervised proposals of every image, keyed by image id.
std::map<int64_t, LabelSet> label_sets(const ProposalFile& file);

}  // namespace udos::pipeline

#include "udos/pipeline/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "udos/maskcore/error.hpp"
#include "udos/pipeline/image_io.hpp"
#include "udos/pipeline/render.hpp"
#include "udos/pipeline/worker_pool.hpp"
#include "udos/proposals/grid.hpp"
#include "udos/proposals/selective_search.hpp"

namespace udos::pipeline {

namespace fs = std::filesystem;

std::string_view algo_name(ProposalAlgo algo) {
  switch (algo) {
    case ProposalAlgo::kSelectiveSearch: return "selsearch";
    case ProposalAlgo::kSegments: return "fzs";
    case ProposalAlgo::kGrid: return "grid";
  }
  return "unknown";
}

ProposalAlgo parse_algo(std::string_view name) {
  if (name == "selsearch") return ProposalAlgo::kSelectiveSearch;
  if (name == "fzs") return ProposalAlgo::kSegments;
  if (name == "grid") return ProposalAlgo::kGrid;
  throw InvalidArgument("unknown proposal algorithm '" + std::string(name) + "'");
}

void ProposeConfig::validate() const {
  seg.validate();
  if (grid_cell < 1) throw InvalidArgument("grid cell must be at least 1 pixel");
}

ImageProposals propose_image(const RgbImage& image, const CocoImage& info, const ProposeConfig& config) {
  config.validate();
  if (image.height != info.height || image.width != info.width) {
    std::ostringstream os;
    os << "image " << info.id << " (" << info.file_name << ") is " << image.height << "x" << image.width
       << " but the listing says " << info.height << "x" << info.width;
    throw DimensionMismatch(os.str());
  }
  ImageProposals out;
  out.image = info;
  switch (config.algo) {
    case ProposalAlgo::kSelectiveSearch:
      out.proposals = proposals::selective_search(image, config.seg);
      break;
    case ProposalAlgo::kSegments:
      out.proposals = proposals::segment_proposals(image, config.seg);
      break;
    case ProposalAlgo::kGrid:
      out.proposals = proposals::grid_proposals(image.height, image.width, config.grid_cell);
      break;
  }
  for (auto& p : out.proposals) p.provenance = Provenance::kUnsupervised;
  return out;
}

std::vector<CocoImage> list_images(const fs::path& dir, const CocoDataset* dataset, FileAudit& audit) {
  if (dataset) return dataset->images;
  if (!fs::is_directory(dir)) throw NotFoundError("image directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CocoImage> out;
  for (size_t i = 0; i < files.size(); ++i) {
    const RgbImage img = audit.read_image(files[i]);
    out.push_back({static_cast<int64_t>(i + 1), files[i].filename().string(), img.height, img.width});
  }
  return out;
}

ProposalFile propose_dir(const fs::path& image_dir, const std::vector<CocoImage>& images,
                         const ProposeConfig& config, int workers, FileAudit& audit) {
  config.validate();
  ProposalFile file;
  file.kind = "proposals";
  file.image_dir = image_dir.string();
  file.images.resize(images.size());
  parallel_for(images.size(), workers, [&](size_t i) {
    const RgbImage img = audit.read_image(image_dir / images[i].file_name);
    file.images[i] = propose_image(img, images[i], config);
  });
  return file;
}

void FeatureSource::validate() const {
  if (provider == "handcrafted") return;
  if (provider.rfind("tensor:", 0) == 0 && provider.size() > 7) return;
  throw InvalidArgument("features must be 'handcrafted' or 'tensor:PATH', got '" + provider + "'");
}

features::FeaturePyramid FeatureSource::load(const fs::path& image_dir, const CocoImage& image,
                                             FileAudit& audit) const {
  validate();
  if (provider == "handcrafted") return from_image(audit.read_image(image_dir / image.file_name), image, audit);
  return from_image(RgbImage{}, image, audit);
}

features::FeaturePyramid FeatureSource::from_image(const RgbImage& img, const CocoImage& image,
                                                   FileAudit& audit) const {
  validate();
  if (provider == "handcrafted") return features::handcrafted_pyramid(img, handcrafted);
  const fs::path root = provider.substr(7);
  const fs::path file = fs::is_directory(root) ? root / (fs::path(image.file_name).stem().string() + ".pyr") : root;
  audit.record(FileAudit::Access::kRead, file);
  features::FeaturePyramid pyr = features::load_pyramid(file);
  if (pyr.image_height() != image.height || pyr.image_width() != image.width) {
    std::ostringstream os;
    os << "feature pyramid " << file.string() << " covers " << pyr.image_height() << "x" << pyr.image_width()
       << " but image " << image.id << " is " << image.height << "x" << image.width;
    throw DimensionMismatch(os.str());
  }
  return pyr;
}

ImageProposals group_image(const ImageProposals& parts, const features::FeaturePyramid& pyramid,
                           const grouping::GroupingConfig& config, bool dump_affinity) {
  ImageProposals out;
  out.image = parts.image;
  if (parts.proposals.empty()) return out;
  std::vector<Proposal> input = parts.proposals;
  for (auto& p : input) p.provenance = Provenance::kPart;
  grouping::PartitionResult r = grouping::group_pipeline(input, pyramid, config);
  out.proposals = std::move(r.output);
  out.group_ids = std::move(r.output_group);
  out.groups = std::move(r.groups);
  if (dump_affinity) out.affinity = std::move(r.affinity);
  return out;
}

ProposalFile group_file(const ProposalFile& parts, const FeatureSource& features,
                        const grouping::GroupingConfig& config, bool dump_affinity, int workers,
                        FileAudit& audit) {
  config.validate();
  features.validate();
  ProposalFile out;
  out.kind = "grouped";
  out.image_dir = parts.image_dir;
  out.images.resize(parts.images.size());
  parallel_for(parts.images.size(), workers, [&](size_t i) {
    const ImageProposals& ip = parts.images[i];
    if (ip.proposals.empty()) {
      out.images[i].image = ip.image;
      return;
    }
    const features::FeaturePyramid pyr = features.load(parts.image_dir, ip.image, audit);
    out.images[i] = group_image(ip, pyr, config, dump_affinity);
  });
  return out;
}

std::vector<CocoResult> rank_image(const ImageProposals& proposals, const ranking::RankConfig& config) {
  std::vector<CocoResult> out;
  for (const auto& r : ranking::rank(proposals.proposals, config)) {
    out.push_back(CocoResult{proposals.image.id, r.proposal.box, r.proposal.mask, r.score});
  }
  return out;
}

std::vector<CocoResult> rank_file(const ProposalFile& file, const ranking::RankConfig& config) {
  std::vector<CocoResult> out;
  for (const auto& ip : file.images) {
    std::vector<CocoResult> r = rank_image(ip, config);
    out.insert(out.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  }
  return out;
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::kTrain: return "train";
    case Mode::kInference: return "inference";
    case Mode::kBoth: return "both";
  }
  return "unknown";
}

Mode parse_mode(std::string_view name) {
  if (name == "train") return Mode::kTrain;
  if (name == "inference") return Mode::kInference;
  if (name == "both") return Mode::kBoth;
  throw InvalidArgument("mode must be train, inference or both, got '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
  propose.validate();
  features.validate();
  grouping.validate();
  rank.validate();
  augment.validate();
  if (ks.empty()) throw InvalidArgument("at least one K is required");
  for (int k : ks) {
    if (k < 1) throw InvalidArgument("K must be at least 1");
  }
  if (workers < 1) throw InvalidArgument("workers must be at least 1");
  if (out.empty()) throw InvalidArgument("an output directory is required");
  if (images.empty()) throw InvalidArgument("an image directory is required");
  if (!fs::is_directory(images)) throw NotFoundError("image directory " + images + " does not exist");
  for (const std::string* p : {&gt, &seen_gt, &parts}) {
    if (!p->empty() && !fs::is_regular_file(*p)) throw NotFoundError("input file " + *p + " does not exist");
  }
  if (features.provider.rfind("tensor:", 0) == 0 && !fs::exists(features.provider.substr(7))) {
    throw NotFoundError("feature tensor path " + features.provider.substr(7) + " does not exist");
  }
}

namespace {

void write_overlays(const PipelineConfig& cfg, const ProposalFile& file, FileAudit& audit,
                    std::vector<std::string>& warnings) {
  const fs::path dir = fs::path(cfg.out) / "overlays";
  fs::create_directories(dir);
  for (const auto& ip : file.images) {
    const RgbImage img = audit.read_image(fs::path(cfg.images) / ip.image.file_name);
    std::vector<OverlayItem> items;
    for (size_t k = 0; k < ip.proposals.size(); ++k) {
      if (ip.proposals[k].provenance != Provenance::kGrouped) continue;
      items.push_back({ip.proposals[k].mask, k < ip.group_ids.size() ? ip.group_ids[k] : -1});
    }
    const Overlay ov = render_overlay(img, items);
    if (ov.empty_input) warnings.push_back("image " + ip.image.file_name + ": no grouped proposals to render");
    audit.write_image(dir / (fs::path(ip.image.file_name).stem().string() + ".png"), ov.image);
  }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, FileAudit& audit) {
  cfg.validate();
  const fs::path out = cfg.out;
  fs::create_directories(out);
  PipelineResult result;

  std::optional<CocoDataset> gt;
  if (!cfg.gt.empty()) gt = dataset_from_json(audit.read_json(cfg.gt));
  const std::vector<CocoImage> images = list_images(cfg.images, gt ? &*gt : nullptr, audit);

  std::optional<ProposalFile> proposed;
  if (cfg.mode != Mode::kInference) {
    proposed = propose_dir(cfg.images, images, cfg.propose, cfg.workers, audit);
    audit.write_json(out / "proposals.json", proposal_file_to_json(*proposed));
    if (!cfg.seen_gt.empty()) {
      const CocoDataset seen = dataset_from_json(audit.read_json(cfg.seen_gt));
      const CocoDataset augmented = supervision::augment_dataset(seen, label_sets(*proposed), cfg.augment);
      audit.write_json(out / "augmented.json", dataset_to_json(augmented));
    }
  }
  if (cfg.mode == Mode::kTrain) return result;

  // Part proposals: an external part predictor's file, or the bottom-up
  // stand-in computed in memory.
  ProposalFile parts;
  if (!cfg.parts.empty()) {
    parts = proposal_file_from_json(audit.read_json(cfg.parts));
  } else if (proposed) {
    parts = std::move(*proposed);
  } else {
    parts = propose_dir(cfg.images, images, cfg.propose, cfg.workers, audit);
  }
  parts.image_dir = cfg.images;
  for (auto& ip : parts.images) {
    for (auto& p : ip.proposals) p.provenance = Provenance::kPart;
  }

  ProposalFile ranked_input = parts;
  if (cfg.group) {
    ranked_input = group_file(parts, cfg.features, cfg.grouping, cfg.dump_affinity, cfg.workers, audit);
    audit.write_json(out / "grouped.json", proposal_file_to_json(ranked_input));
  }
  const std::vector<CocoResult> results = rank_file(ranked_input, cfg.rank);
  audit.write_json(out / "results.json", results_to_json(results));

  if (gt) {
    evaluation::EvalReport report = evaluation::evaluate_all(*gt, results, cfg.ks);
    audit.write_json(out / "eval.json", evaluation::report_to_json(report));
    const std::string table = evaluation::report_table(report);
    audit.write_text(out / "eval.txt", table);
    result.report = std::move(report);
  }
  if (cfg.render) write_overlays(cfg, ranked_input, audit, result.warnings);
  return result;
}

}  // namespace udos::pipeline

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "udos/evaluation/evaluation.hpp"
#include "udos/maskcore/coco.hpp"
#include "udos/maskcore/error.hpp"
#include "udos/pipeline/artifacts.hpp"
#include "udos/pipeline/audit.hpp"
#include "udos/pipeline/pipeline.hpp"
#include "udos/pipeline/render.hpp"
#include "udos/pipeline/synth.hpp"
#include "udos/supervision/augment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace udos;
using namespace udos::pipeline;

namespace {

// Exit codes: 0 success, 1 unexpected failure, 2 usage, 3.. one per ErrorKind.
constexpr int kExitUnexpected = 1;
constexpr int kExitUsage = 2;
int exit_code(ErrorKind kind) { return 3 + static_cast<int>(kind); }

void report_error(std::string_view kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

void report_warning(const std::string& message) { std::cerr << json{{"warning", message}}.dump() << "\n"; }

// Flag names double as config keys, so `key = value` lines in a --config
// file set exactly what `--key value` would.
struct PipelineFlags {
  PipelineConfig cfg;
  std::string config;
  std::string mode = "both";
  std::string algo = "selsearch";
  std::string dedup = "mask";

  void bind(CLI::App& app) {
    app.add_option("--mode", mode, "train, inference or both")->capture_default_str();
    app.add_option("--config", config, "key = value file; flags given on the command line take precedence");
    app.add_option("--images", cfg.images, "image directory");
    app.add_option("--gt", cfg.gt, "evaluation ground truth");
    app.add_option("--seen-gt", cfg.seen_gt, "labeled seen-class annotations to augment");
    app.add_option("--parts", cfg.parts, "precomputed part proposals for inference");
    app.add_option("--out", cfg.out, "output directory")->capture_default_str();
    app.add_option("--algo", algo, "selsearch, fzs or grid")->capture_default_str();
    app.add_option("--k", cfg.propose.seg.scale_k)->capture_default_str();
    app.add_option("--sigma", cfg.propose.seg.sigma)->capture_default_str();
    app.add_option("--min-size", cfg.propose.seg.min_size)->capture_default_str();
    app.add_option("--grid-cell", cfg.propose.grid_cell)->capture_default_str();
    app.add_option("--features", cfg.features.provider, "handcrafted or tensor:PATH")->capture_default_str();
    app.add_option("--group", cfg.group, "run the grouping stage")->capture_default_str();
    app.add_option("--delta", cfg.grouping.delta)->capture_default_str();
    app.add_option("--tau", cfg.grouping.tau)->capture_default_str();
    app.add_option("--keep-originals", cfg.grouping.keep_originals)->capture_default_str();
    app.add_option("--top-k", cfg.rank.top_k)->capture_default_str();
    app.add_option("--dedup-iou", cfg.rank.dedup_iou)->capture_default_str();
    app.add_option("--dedup", dedup, "mask or box")->capture_default_str();
    app.add_option("--iou-thresh", cfg.augment.iou_exclude_threshold)->capture_default_str();
    app.add_option("--ks", cfg.ks)->delimiter(',')->capture_default_str();
    app.add_option("--workers", cfg.workers)->capture_default_str();
    app.add_option("--seed", cfg.seed)->capture_default_str();
    app.add_option("--render", cfg.render, "write overlay PNGs")->capture_default_str();
    app.add_option("--dump-affinity", cfg.dump_affinity)->capture_default_str();
  }

  // Config values fill only the options the command line left unset.
  PipelineConfig finish(CLI::App& app) {
    if (!config.empty()) {
      if (!fs::is_regular_file(config)) throw NotFoundError("config file " + config + " does not exist");
      for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(config)) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        CLI::Option* opt = app.get_option_no_throw("--" + item.name);
        if (opt == nullptr || !item.parents.empty() || item.name == "config") {
          throw InvalidArgument("unknown config key '" + item.fullname() + "' in " + config);
        }
        if (opt->count() > 0) continue;
        opt->add_result(item.inputs);
        opt->run_callback();
      }
    }
    cfg.mode = parse_mode(mode);
    cfg.propose.algo = parse_algo(algo);
    cfg.rank.dedup = parse_dedup(dedup);
    return cfg;
  }

  static ranking::DedupMode parse_dedup(const std::string& name) {
    if (name == "mask") return ranking::DedupMode::kMask;
    if (name == "box") return ranking::DedupMode::kBox;
    throw InvalidArgument("unknown dedup mode '" + name + "' (expected mask or box)");
  }
};

void require_file(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path)) throw NotFoundError(what + " " + path + " does not exist");
}

// Items to draw for one image from either a results file or a proposal file.
std::vector<OverlayItem> overlay_items(const json& pred, const fs::path& image_path,
                                       std::optional<int64_t> image_id, int max_items) {
  std::vector<OverlayItem> items;
  if (pred.is_object() && pred.contains("kind")) {
    const ProposalFile file = proposal_file_from_json(pred);
    for (const auto& ip : file.images) {
      const bool hit = image_id ? ip.image.id == *image_id
                                : fs::path(ip.image.file_name).filename() == image_path.filename();
      if (!hit) continue;
      for (size_t k = 0; k < ip.proposals.size() && static_cast<int>(items.size()) < max_items; ++k) {
        if (file.kind == "grouped" && ip.proposals[k].provenance != Provenance::kGrouped) continue;
        items.push_back({ip.proposals[k].mask, k < ip.group_ids.size() ? ip.group_ids[k] : static_cast<int>(k)});
      }
      return items;
    }
    throw UnknownImageError("no proposals for image " + image_path.filename().string());
  }
  const std::vector<CocoResult> results = results_from_json(pred);
  if (!image_id) {
    for (const auto& r : results) {
      if (image_id && *image_id != r.image_id) {
        throw InvalidArgument("results cover several images; pass --image-id");
      }
      image_id = r.image_id;
    }
  }
  for (const auto& r : results) {
    if (r.image_id != image_id || static_cast<int>(items.size()) >= max_items) continue;
    items.push_back({r.mask, static_cast<int>(items.size())});
  }
  return items;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-world part proposal, grouping, ranking and recall evaluation"};
  app.require_subcommand(1);
  FileAudit audit;
  std::function<void()> action;

  // propose
  std::string p_input, p_gt, p_out, p_algo = "selsearch";
  ProposeConfig p_cfg;
  int p_workers = 1;
  auto* propose = app.add_subcommand("propose", "unsupervised part proposals for a directory of images");
  propose->add_option("--input", p_input, "image directory")->required();
  propose->add_option("--gt", p_gt, "dataset whose image list and ids to use");
  propose->add_option("--algo", p_algo, "selsearch, fzs or grid")->capture_default_str();
  propose->add_option("--k", p_cfg.seg.scale_k)->capture_default_str();
  propose->add_option("--sigma", p_cfg.seg.sigma)->capture_default_str();
  propose->add_option("--min-size", p_cfg.seg.min_size)->capture_default_str();
  propose->add_option("--grid-cell", p_cfg.grid_cell)->capture_default_str();
  propose->add_option("--workers", p_workers)->capture_default_str();
  propose->add_option("--out", p_out)->required();
  propose->callback([&] {
    action = [&] {
      if (!fs::is_directory(p_input)) throw NotFoundError("image directory " + p_input + " does not exist");
      if (p_workers < 1) throw InvalidArgument("workers must be at least 1");
      p_cfg.algo = parse_algo(p_algo);
      p_cfg.validate();
      std::optional<CocoDataset> ds;
      if (!p_gt.empty()) {
        require_file(p_gt, "dataset");
        ds = dataset_from_json(audit.read_json(p_gt));
      }
      const auto images = list_images(p_input, ds ? &*ds : nullptr, audit);
      audit.write_json(p_out, proposal_file_to_json(propose_dir(p_input, images, p_cfg, p_workers, audit)));
    };
  });

  // augment
  std::string a_gt, a_props, a_out;
  supervision::AugmentationConfig a_cfg;
  auto* augment = app.add_subcommand("augment", "add unsupervised proposals to seen-class annotations");
  augment->add_option("--gt", a_gt)->required();
  augment->add_option("--proposals", a_props)->required();
  augment->add_option("--iou-thresh", a_cfg.iou_exclude_threshold)->capture_default_str();
  augment->add_option("--out", a_out)->required();
  augment->callback([&] {
    action = [&] {
      require_file(a_gt, "annotations");
      require_file(a_props, "proposal file");
      a_cfg.validate();
      const CocoDataset gt = dataset_from_json(audit.read_json(a_gt));
      const ProposalFile props = proposal_file_from_json(audit.read_json(a_props));
      audit.write_json(a_out, dataset_to_json(supervision::augment_dataset(gt, label_sets(props), a_cfg)));
    };
  });

  // group
  std::string g_parts, g_images, g_out;
  FeatureSource g_features;
  grouping::GroupingConfig g_cfg;
  bool g_dump = false;
  int g_workers = 1;
  auto* group = app.add_subcommand("group", "group part proposals into object proposals");
  group->add_option("--parts", g_parts)->required();
  group->add_option("--images", g_images, "image directory, default: the one recorded in the parts file");
  group->add_option("--features", g_features.provider, "handcrafted or tensor:PATH")->capture_default_str();
  group->add_option("--delta", g_cfg.delta)->capture_default_str();
  group->add_option("--tau", g_cfg.tau)->capture_default_str();
  group->add_option("--keep-originals", g_cfg.keep_originals)->capture_default_str();
  group->add_option("--dump-affinity", g_dump)->capture_default_str();
  group->add_option("--workers", g_workers)->capture_default_str();
  group->add_option("--out", g_out)->required();
  group->callback([&] {
    action = [&] {
      require_file(g_parts, "part proposal file");
      if (g_workers < 1) throw InvalidArgument("workers must be at least 1");
      g_features.validate();
      g_cfg.validate();
      ProposalFile parts = proposal_file_from_json(audit.read_json(g_parts));
      if (!g_images.empty()) parts.image_dir = g_images;
      audit.write_json(g_out, proposal_file_to_json(group_file(parts, g_features, g_cfg, g_dump, g_workers, audit)));
    };
  });

  // rank
  std::string r_in, r_out, r_dedup = "mask";
  ranking::RankConfig r_cfg;
  auto* rank = app.add_subcommand("rank", "score, deduplicate and truncate proposals into results");
  rank->add_option("--in", r_in)->required();
  rank->add_option("--top-k", r_cfg.top_k)->capture_default_str();
  rank->add_option("--dedup-iou", r_cfg.dedup_iou)->capture_default_str();
  rank->add_option("--dedup", r_dedup, "mask or box")->capture_default_str();
  rank->add_option("--out", r_out)->required();
  rank->callback([&] {
    action = [&] {
      require_file(r_in, "proposal file");
      r_cfg.dedup = PipelineFlags::parse_dedup(r_dedup);
      r_cfg.validate();
      const ProposalFile file = proposal_file_from_json(audit.read_json(r_in));
      audit.write_json(r_out, results_to_json(rank_file(file, r_cfg)));
    };
  });

  // eval
  std::string e_gt, e_pred, e_out, e_kind = "both";
  std::vector<int> e_ks{100, 300};
  auto* eval = app.add_subcommand("eval", "class-agnostic average recall");
  eval->add_option("--gt", e_gt)->required();
  eval->add_option("--pred", e_pred)->required();
  eval->add_option("--ks", e_ks)->delimiter(',')->capture_default_str();
  eval->add_option("--kind", e_kind, "box, mask or both")->capture_default_str();
  eval->add_option("--out", e_out);
  eval->callback([&] {
    action = [&] {
      require_file(e_gt, "ground truth");
      require_file(e_pred, "results file");
      const CocoDataset gt = dataset_from_json(audit.read_json(e_gt));
      const std::vector<CocoResult> preds = results_from_json(audit.read_json(e_pred));
      const evaluation::EvalReport report =
          e_kind == "both" ? evaluation::evaluate_all(gt, preds, e_ks)
                           : evaluation::evaluate(gt, preds, e_ks, evaluation::parse_iou_kind(e_kind));
      if (!e_out.empty()) audit.write_json(e_out, evaluation::report_to_json(report));
      std::cout << evaluation::report_table(report);
    };
  });

  // render
  std::string v_image, v_pred, v_out;
  std::optional<int64_t> v_image_id;
  int v_max = 50;
  auto* render = app.add_subcommand("render", "overlay proposal masks on an image");
  render->add_option("--image", v_image)->required();
  render->add_option("--pred", v_pred, "results or proposal file")->required();
  render->add_option("--image-id", v_image_id, "image to draw when the file covers several");
  render->add_option("--max", v_max, "maximum number of masks drawn")->capture_default_str();
  render->add_option("--out", v_out)->required();
  render->callback([&] {
    action = [&] {
      require_file(v_pred, "prediction file");
      if (v_max < 0) throw InvalidArgument("max must be nonnegative");
      const RgbImage image = audit.read_image(v_image);
      const Overlay ov = render_overlay(image, overlay_items(audit.read_json(v_pred), v_image, v_image_id, v_max));
      if (ov.empty_input) report_warning("no proposals for " + v_image + "; writing the image unchanged");
      audit.write_image(v_out, ov.image);
    };
  });

  // pipeline
  PipelineFlags flags;
  auto* pipe = app.add_subcommand("pipeline", "propose, augment, group, rank and evaluate end to end");
  flags.bind(*pipe);
  pipe->callback([&] {
    action = [&] {
      const PipelineResult res = run_pipeline(flags.finish(*pipe), audit);
      for (const auto& w : res.warnings) report_warning(w);
      if (res.report) std::cout << evaluation::report_table(*res.report);
    };
  });

  // synth
  std::string s_out;
  SynthConfig s_cfg;
  auto* synth = app.add_subcommand("synth", "write a synthetic open-world dataset");
  synth->add_option("--out", s_out)->required();
  synth->add_option("--scenes", s_cfg.num_scenes)->capture_default_str();
  synth->add_option("--seed", s_cfg.seed)->capture_default_str();
  synth->add_option("--height", s_cfg.height)->capture_default_str();
  synth->add_option("--width", s_cfg.width)->capture_default_str();
  synth->add_option("--min-objects", s_cfg.min_objects)->capture_default_str();
  synth->add_option("--max-objects", s_cfg.max_objects)->capture_default_str();
  synth->add_option("--occluders", s_cfg.max_occluders)->capture_default_str();
  synth->callback([&] {
    action = [&] {
      s_cfg.validate();
      write_synthetic_dataset(s_out, s_cfg);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage_error", e.what());
    return kExitUsage;
  }

  try {
    action();
  } catch (const Error& e) {
    report_error(error_kind_name(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    report_error(error_kind_name(ErrorKind::kIo), e.what());
    return exit_code(ErrorKind::kIo);
  } catch (const std::exception& e) {
    report_error("internal_error", e.what());
    return kExitUnexpected;
  }
  return 0;
}

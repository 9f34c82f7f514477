#include "udos/evaluation/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "udos/maskcore/error.hpp"

namespace udos::evaluation {

std::string_view iou_kind_name(IouKind kind) { return kind == IouKind::kBox ? "box" : "mask"; }

IouKind parse_iou_kind(std::string_view name) {
  if (name == "box") return IouKind::kBox;
  if (name == "mask") return IouKind::kMask;
  throw InvalidArgument("IoU kind must be 'box' or 'mask', got '" + std::string(name) + "'");
}

const std::array<double, kNumThresholds>& iou_thresholds() {
  static const std::array<double, kNumThresholds> t = [] {
    std::array<double, kNumThresholds> v{};
    for (int i = 0; i < kNumThresholds; ++i) v[i] = (50 + 5 * i) / 100.0;
    return v;
  }();
  return t;
}

namespace {

struct ImageWork {
  std::vector<size_t> gt;     // annotation indices, counted first then ignore
  size_t num_counted = 0;
  std::vector<size_t> preds;  // prediction indices in input order
};

std::vector<int> checked_ks(std::span<const int> ks) {
  if (ks.empty()) throw InvalidArgument("at least one K is required");
  std::vector<int> out(ks.begin(), ks.end());
  for (int k : out) {
    if (k < 1) throw InvalidArgument("K must be at least 1, got " + std::to_string(k));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Rank (0-based) at which each threshold's greedy pass matched a counted GT.
// matched_rank[t] is sorted ascending.
void match_image(const CocoDataset& gt, std::span<const CocoResult> preds, const ImageWork& w,
                 int max_k, IouKind kind,
                 std::array<std::vector<int>, kNumThresholds>& matched_rank) {
  const size_t np = std::min(w.preds.size(), static_cast<size_t>(max_k));
  const size_t ng = w.gt.size();
  if (np == 0 || ng == 0) return;
  std::vector<double> iou(np * ng);
  for (size_t p = 0; p < np; ++p) {
    const CocoResult& r = preds[w.preds[p]];
    for (size_t g = 0; g < ng; ++g) {
      const CocoAnnotation& a = gt.annotations[w.gt[g]];
      iou[p * ng + g] = kind == IouKind::kBox ? box_iou(r.box, a.box) : mask_iou(r.mask, a.mask);
    }
  }
  const auto& thresholds = iou_thresholds();
  std::vector<uint8_t> taken(ng);
  for (int t = 0; t < kNumThresholds; ++t) {
    std::fill(taken.begin(), taken.end(), 0);
    for (size_t p = 0; p < np; ++p) {
      int best = -1;
      double best_iou = -1.0;
      for (size_t g = 0; g < w.num_counted; ++g) {
        const double v = iou[p * ng + g];
        if (!taken[g] && v >= thresholds[t] && v > best_iou) {
          best = static_cast<int>(g);
          best_iou = v;
        }
      }
      if (best >= 0) {
        taken[best] = 1;
        matched_rank[t].push_back(static_cast<int>(p));
      }
      // Otherwise the prediction may sit on an ignore GT; it counts for
      // nothing either way.
    }
  }
}

}  // namespace

EvalReport evaluate(const CocoDataset& gt, std::span<const CocoResult> predictions,
                    std::span<const int> ks_in, IouKind kind) {
  const std::vector<int> ks = checked_ks(ks_in);
  std::unordered_map<int64_t, size_t> image_index;
  for (size_t i = 0; i < gt.images.size(); ++i) image_index.emplace(gt.images[i].id, i);

  std::vector<ImageWork> work(gt.images.size());
  std::vector<size_t> ignored;
  for (size_t a = 0; a < gt.annotations.size(); ++a) {
    auto it = image_index.find(gt.annotations[a].image_id);
    if (it == image_index.end()) {
      throw UnknownImageError("annotation " + std::to_string(gt.annotations[a].id) +
                              " references unknown image " +
                              std::to_string(gt.annotations[a].image_id));
    }
  }
  for (size_t a = 0; a < gt.annotations.size(); ++a) {
    if (gt.annotations[a].ignore) continue;
    ImageWork& w = work[image_index[gt.annotations[a].image_id]];
    w.gt.push_back(a);
    ++w.num_counted;
  }
  for (size_t a = 0; a < gt.annotations.size(); ++a) {
    if (gt.annotations[a].ignore) work[image_index[gt.annotations[a].image_id]].gt.push_back(a);
  }

  std::set<int64_t> unknown;
  for (size_t p = 0; p < predictions.size(); ++p) {
    auto it = image_index.find(predictions[p].image_id);
    if (it == image_index.end()) {
      unknown.insert(predictions[p].image_id);
      continue;
    }
    ImageWork& w = work[it->second];
    if (!w.preds.empty() && predictions[w.preds.back()].score < predictions[p].score) {
      std::ostringstream os;
      os << "predictions for image " << predictions[p].image_id
         << " are not sorted by descending score (result " << p << ")";
      throw UnsortedError(os.str());
    }
    w.preds.push_back(p);
  }
  if (!unknown.empty()) {
    std::ostringstream os;
    os << "predictions reference unknown image ids:";
    for (int64_t id : unknown) os << ' ' << id;
    throw UnknownImageError(os.str());
  }

  EvalReport report;
  report.num_images = static_cast<int64_t>(gt.images.size());
  report.num_predictions = static_cast<int64_t>(predictions.size());
  report.ks = ks;
  for (const auto& w : work) report.num_gt += static_cast<int64_t>(w.num_counted);

  KindReport kr;
  for (int k : ks) kr.matched[k].fill(0);
  std::array<std::vector<int>, kNumThresholds> ranks;
  for (const auto& w : work) {
    for (auto& r : ranks) r.clear();
    match_image(gt, predictions, w, ks.back(), kind, ranks);
    for (int t = 0; t < kNumThresholds; ++t) {
      for (int k : ks) {
        // Greedy matching of the top-K is the first K steps of the longer run.
        const auto n = std::lower_bound(ranks[t].begin(), ranks[t].end(), k) - ranks[t].begin();
        kr.matched[k][t] += n;
      }
    }
  }
  for (int k : ks) {
    double sum = 0.0;
    for (int t = 0; t < kNumThresholds; ++t) {
      const double r = report.num_gt > 0 ? static_cast<double>(kr.matched[k][t]) / report.num_gt : 0.0;
      kr.recall[k][t] = r;
      sum += r;
    }
    kr.ar[k] = sum / kNumThresholds;
  }
  (kind == IouKind::kBox ? report.box : report.mask) = std::move(kr);
  return report;
}

EvalReport evaluate_all(const CocoDataset& gt, std::span<const CocoResult> predictions,
                        std::span<const int> ks) {
  EvalReport report = evaluate(gt, predictions, ks, IouKind::kBox);
  report.mask = evaluate(gt, predictions, ks, IouKind::kMask).mask;
  return report;
}

namespace {

nlohmann::json kind_to_json(const KindReport& kr) {
  nlohmann::json j;
  for (const auto& [k, ar] : kr.ar) {
    const std::string key = std::to_string(k);
    j["ar"][key] = ar;
    j["recall"][key] = kr.recall.at(k);
    j["matched"][key] = kr.matched.at(k);
  }
  return j;
}

KindReport kind_from_json(const nlohmann::json& j) {
  KindReport kr;
  try {
    for (const auto& [key, v] : j.at("ar").items()) {
      const int k = std::stoi(key);
      kr.ar[k] = v.get<double>();
      kr.recall[k] = j.at("recall").at(key).get<std::array<double, kNumThresholds>>();
      kr.matched[k] = j.at("matched").at(key).get<std::array<int64_t, kNumThresholds>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("eval report: ") + e.what());
  } catch (const std::logic_error& e) {
    throw SchemaError(std::string("eval report: bad K key: ") + e.what());
  }
  return kr;
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["num_images"] = report.num_images;
  j["num_gt"] = report.num_gt;
  j["num_predictions"] = report.num_predictions;
  j["ks"] = report.ks;
  j["iou_thresholds"] = iou_thresholds();
  if (report.box) j["box"] = kind_to_json(*report.box);
  if (report.mask) j["mask"] = kind_to_json(*report.mask);
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw SchemaError("eval report: unsupported schema_version");
    }
    r.num_images = j.at("num_images").get<int64_t>();
    r.num_gt = j.at("num_gt").get<int64_t>();
    r.num_predictions = j.at("num_predictions").get<int64_t>();
    r.ks = j.at("ks").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("eval report: ") + e.what());
  }
  if (j.contains("box")) r.box = kind_from_json(j.at("box"));
  if (j.contains("mask")) r.mask = kind_from_json(j.at("mask"));
  return r;
}

std::string report_table(const EvalReport& report) {
  std::ostringstream os;
  char buf[64];
  os << "kind ";
  for (int k : report.ks) {
    std::snprintf(buf, sizeof buf, " %8s", ("AR@" + std::to_string(k)).c_str());
    os << buf;
  }
  os << '\n';
  const auto row = [&](const char* name, const std::optional<KindReport>& kr) {
    if (!kr) return;
    std::snprintf(buf, sizeof buf, "%-5s", name);
    os << buf;
    for (int k : report.ks) {
      std::snprintf(buf, sizeof buf, " %8.4f", kr->ar.at(k));
      os << buf;
    }
    os << '\n';
  };
  row("box", report.box);
  row("mask", report.mask);
  os << "images " << report.num_images << ", gt " << report.num_gt << ", predictions "
     << report.num_predictions << '\n';
  return os.str();
}

}  // namespace udos::evaluation

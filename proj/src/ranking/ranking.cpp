#include "udos/ranking/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "udos/maskcore/error.hpp"

namespace udos::ranking {

void RankConfig::validate() const {
  if (top_k < 1) throw InvalidArgument("top_k must be at least 1");
  if (!(dedup_iou >= 0.0 && dedup_iou <= 1.0)) throw InvalidArgument("dedup_iou must lie in [0, 1]");
}

double fuse_score(double c, double b, double m) {
  for (double v : {c, b, m}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      std::ostringstream os;
      os << "score component " << v << " outside [0, 1]";
      throw InvalidArgument(os.str());
    }
  }
  return std::cbrt(c * b * m);
}

double fuse_score(const Proposal& p) { return fuse_score(p.score_c, p.score_b, p.score_m); }

namespace {

bool corners_less(const Box& a, const Box& b) {
  const CornerBox ca = a.corners();
  const CornerBox cb = b.corners();
  return std::tie(ca.x1, ca.y1, ca.x2, ca.y2) < std::tie(cb.x1, cb.y1, cb.x2, cb.y2);
}

// Upper bound on mask IoU from areas and boxes alone.
bool may_exceed(const Proposal& a, const Proposal& b, double threshold) {
  const double aa = static_cast<double>(a.mask.area());
  const double ab = static_cast<double>(b.mask.area());
  const double hi = std::max(aa, ab);
  if (hi > 0.0 && std::min(aa, ab) / hi <= threshold) return false;
  return box_iou(a.box, b.box) > 0.0;
}

}  // namespace

std::vector<RankedProposal> rank(std::span<const Proposal> proposals, const RankConfig& config) {
  config.validate();
  const size_t n = proposals.size();
  std::vector<double> score(n);
  for (size_t i = 0; i < n; ++i) score[i] = fuse_score(proposals[i]);

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    if (score[i] != score[j]) return score[i] > score[j];
    const Proposal& a = proposals[i];
    const Proposal& b = proposals[j];
    if (a.mask.area() != b.mask.area()) return a.mask.area() > b.mask.area();
    if (!(a.box == b.box)) return corners_less(a.box, b.box);
    return a.mask.counts() < b.mask.counts();
  });

  std::vector<RankedProposal> kept;
  std::vector<size_t> kept_index;
  for (size_t i : order) {
    if (kept.size() >= static_cast<size_t>(config.top_k)) break;
    const Proposal& p = proposals[i];
    bool suppressed = false;
    for (size_t k : kept_index) {
      const Proposal& q = proposals[k];
      double iou = 0.0;
      if (config.dedup == DedupMode::kBox) {
        iou = box_iou(p.box, q.box);
      } else if (may_exceed(p, q, config.dedup_iou)) {
        iou = mask_iou(p.mask, q.mask);
      }
      if (iou > config.dedup_iou) {
        suppressed = true;
        break;
      }
    }
    if (suppressed) continue;
    kept.push_back({p, score[i]});
    kept_index.push_back(i);
  }
  return kept;
}

}  // namespace udos::ranking

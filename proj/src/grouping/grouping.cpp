#include "udos/grouping/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "udos/maskcore/error.hpp"

namespace udos::grouping {

void GroupingConfig::validate() const {
  if (!(delta >= 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in [0, 1)");
  if (!(tau >= -1.0 && tau <= 1.0)) throw InvalidArgument("tau must lie in [-1, 1]");
}

Box expand_box(const Box& box, double delta, int image_width, int image_height) {
  if (!(delta >= 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in [0, 1)");
  const Box grown(box.cx(), box.cy(), (1.0 + delta) * box.w(), (1.0 + delta) * box.h());
  std::optional<Box> clipped = grown.clipped(image_width, image_height);
  if (!clipped) throw InvalidArgument("expanded box lies outside the image");
  return *clipped;
}

AffinityMatrix pairwise_affinity(std::span<const features::FeatureVector> features) {
  const int n = static_cast<int>(features.size());
  AffinityMatrix m;
  m.n = n;
  m.values.assign(static_cast<size_t>(n) * n, 0.0);
  if (n == 0) return m;
  const size_t dim = features[0].dim();
  std::vector<double> norms(n);
  for (int i = 0; i < n; ++i) {
    if (features[i].dim() != dim) {
      std::ostringstream os;
      os << "feature " << i << " has dim " << features[i].dim() << ", expected " << dim;
      throw DimensionMismatch(os.str());
    }
    double s = 0.0;
    for (double v : features[i].values) s += v * v;
    norms[i] = std::sqrt(s);
    if (!(norms[i] > 0.0) || !std::isfinite(norms[i])) {
      std::ostringstream os;
      os << "feature " << i << " has zero or non-finite norm";
      throw InvalidArgument(os.str());
    }
  }
  for (int i = 0; i < n; ++i) {
    m.at(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double dot = 0.0;
      const auto& a = features[i].values;
      const auto& b = features[j].values;
      for (size_t k = 0; k < dim; ++k) dot += a[k] * b[k];
      const double cosine = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
      m.at(i, j) = cosine;
      m.at(j, i) = cosine;
    }
  }
  return m;
}

namespace {

struct Candidate {
  double mean;
  int lo;
  int hi;
  uint32_t lo_version;
  uint32_t hi_version;
};

struct CandidateOrder {
  bool operator()(const Candidate& l, const Candidate& r) const {
    if (l.mean != r.mean) return l.mean < r.mean;
    if (l.lo != r.lo) return l.lo > r.lo;
    return l.hi > r.hi;
  }
};

void check_square_symmetric(const AffinityMatrix& a) {
  if (a.n < 0 || a.values.size() != static_cast<size_t>(a.n) * a.n) {
    throw InvalidArgument("affinity matrix storage does not match n x n");
  }
  for (int i = 0; i < a.n; ++i) {
    if (std::abs(a.at(i, i) - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "affinity diagonal entry " << i << " is " << a.at(i, i) << ", expected 1";
      throw InvalidArgument(os.str());
    }
    for (int j = i + 1; j < a.n; ++j) {
      if (std::abs(a.at(i, j) - a.at(j, i)) > 1e-12) {
        std::ostringstream os;
        os << "affinity matrix is asymmetric at (" << i << ", " << j << ")";
        throw InvalidArgument(os.str());
      }
    }
  }
}

}  // namespace

Clustering cluster(const AffinityMatrix& affinity, double tau) {
  check_square_symmetric(affinity);
  const int n = affinity.n;
  // Clusters live at the index of their smallest member. sums[a*n+b] is the
  // total shifted affinity between live clusters a and b.
  std::vector<double> sums(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) sums[static_cast<size_t>(i) * n + j] = affinity.at(i, j) - tau;
  }
  std::vector<int> size(n, 1);
  std::vector<uint32_t> version(n, 0);
  std::vector<uint8_t> alive(n, 1);
  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < n; ++i) members[i] = {i};

  std::vector<Candidate> initial;
  initial.reserve(static_cast<size_t>(n) * (n > 0 ? n - 1 : 0) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double s = sums[static_cast<size_t>(i) * n + j];
      if (s > 0.0) initial.push_back({s, i, j, 0, 0});
    }
  }
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> heap(
      CandidateOrder{}, std::move(initial));

  Clustering out;
  while (!heap.empty()) {
    const Candidate top = heap.top();
    heap.pop();
    if (!alive[top.lo] || !alive[top.hi] || version[top.lo] != top.lo_version ||
        version[top.hi] != top.hi_version) {
      continue;
    }
    const int a = top.lo;
    const int b = top.hi;
    out.merge_heights.push_back(top.mean);
    alive[b] = 0;
    size[a] += size[b];
    ++version[a];
    members[a].insert(members[a].end(), members[b].begin(), members[b].end());
    members[b].clear();
    for (int c = 0; c < n; ++c) {
      if (!alive[c] || c == a) continue;
      const double s = sums[static_cast<size_t>(a) * n + c] + sums[static_cast<size_t>(b) * n + c];
      sums[static_cast<size_t>(a) * n + c] = s;
      sums[static_cast<size_t>(c) * n + a] = s;
      const double mean = s / (static_cast<double>(size[a]) * size[c]);
      if (mean > 0.0) {
        const int lo = std::min(a, c);
        const int hi = std::max(a, c);
        heap.push({mean, lo, hi, version[lo], version[hi]});
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    std::sort(members[i].begin(), members[i].end());
    out.groups.push_back(std::move(members[i]));
  }
  return out;
}

double partition_objective(const AffinityMatrix& affinity, double tau,
                           const std::vector<std::vector<int>>& groups) {
  double total = 0.0;
  for (const auto& g : groups) {
    for (size_t i = 0; i < g.size(); ++i) {
      for (size_t j = i + 1; j < g.size(); ++j) total += affinity.at(g[i], g[j]) - tau;
    }
  }
  return total;
}

double cohesion_score(const AffinityMatrix& affinity, double tau, std::span<const int> group) {
  double shifted = 0.0;
  if (group.size() >= 2) {
    double sum = 0.0;
    int pairs = 0;
    for (size_t i = 0; i < group.size(); ++i) {
      for (size_t j = i + 1; j < group.size(); ++j) {
        sum += affinity.at(group[i], group[j]) - tau;
        ++pairs;
      }
    }
    shifted = sum / pairs;
  }
  return std::clamp((shifted + 1.0 + tau) / 2.0, 0.0, 1.0);
}

namespace {

void check_partition(const std::vector<std::vector<int>>& groups, size_t n) {
  std::vector<uint8_t> seen(n, 0);
  size_t total = 0;
  for (const auto& g : groups) {
    if (g.empty()) throw InvalidArgument("groups must be nonempty");
    for (int i : g) {
      if (i < 0 || static_cast<size_t>(i) >= n || seen[i]) {
        throw InvalidArgument("groups must partition the part indices");
      }
      seen[i] = 1;
      ++total;
    }
  }
  if (total != n) throw InvalidArgument("groups must cover every part");
}

Proposal merge_one(std::span<const Proposal> parts, const std::vector<int>& group) {
  std::vector<BinaryMask> masks;
  masks.reserve(group.size());
  Proposal merged = parts[group.front()];
  merged.score_c = merged.score_b = merged.score_m = 0.0;
  for (int i : group) {
    masks.push_back(parts[i].mask);
    merged.score_c = std::max(merged.score_c, parts[i].score_c);
    merged.score_b = std::max(merged.score_b, parts[i].score_b);
    merged.score_m = std::max(merged.score_m, parts[i].score_m);
  }
  merged.mask = mask_union(masks);
  if (std::optional<Box> tight = merged.mask.tight_box()) {
    merged.box = *tight;
  } else {
    // Only reachable with empty part masks: fall back to the box hull.
    for (int i : group) merged.box = box_hull(merged.box, parts[i].box);
  }
  merged.provenance = Provenance::kGrouped;
  return merged;
}

}  // namespace

std::vector<Proposal> merge_groups(std::span<const Proposal> parts,
                                   const std::vector<std::vector<int>>& groups,
                                   bool keep_originals) {
  check_partition(groups, parts.size());
  std::vector<Proposal> out;
  if (keep_originals) {
    out.assign(parts.begin(), parts.end());
    for (const auto& g : groups) {
      if (g.size() >= 2) out.push_back(merge_one(parts, g));
    }
  } else {
    for (const auto& g : groups) {
      out.push_back(g.size() >= 2 ? merge_one(parts, g) : parts[g.front()]);
    }
  }
  return out;
}

PartitionResult group_pipeline(std::span<const Proposal> parts,
                               const features::FeaturePyramid& pyramid,
                               const GroupingConfig& config) {
  config.validate();
  if (parts.empty()) throw InvalidArgument("group_pipeline needs at least one part");
  const int w = pyramid.image_width();
  const int h = pyramid.image_height();

  std::vector<features::FeatureVector> feats;
  feats.reserve(parts.size());
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].mask.height() != h || parts[i].mask.width() != w) {
      std::ostringstream os;
      os << "part " << i << " mask is " << parts[i].mask.height() << "x" << parts[i].mask.width()
         << " but the feature pyramid covers " << h << "x" << w;
      throw DimensionMismatch(os.str());
    }
    const Box expanded = expand_box(parts[i].box, config.delta, w, h);
    feats.push_back(features::roi_align(pyramid, expanded, config.roi));
  }

  PartitionResult result;
  result.affinity = pairwise_affinity(feats);
  Clustering clusters = cluster(result.affinity, config.tau);
  result.groups = std::move(clusters.groups);
  result.merge_heights = std::move(clusters.merge_heights);

  std::vector<Proposal> scored(parts.begin(), parts.end());
  std::vector<int> group_of(parts.size(), 0);
  for (size_t g = 0; g < result.groups.size(); ++g) {
    const double c = cohesion_score(result.affinity, config.tau, result.groups[g]);
    for (int i : result.groups[g]) {
      group_of[i] = static_cast<int>(g);
      if (config.cohesion_scores) {
        scored[i].score_c = c;
        scored[i].score_b = 1.0;
        scored[i].score_m = 1.0;
      }
    }
  }

  result.output = merge_groups(scored, result.groups, config.keep_originals);
  if (config.keep_originals) {
    result.output_group = group_of;
    for (size_t g = 0; g < result.groups.size(); ++g) {
      if (result.groups[g].size() >= 2) result.output_group.push_back(static_cast<int>(g));
    }
  } else {
    for (size_t g = 0; g < result.groups.size(); ++g) result.output_group.push_back(static_cast<int>(g));
  }
  for (size_t k = 0; k < result.output.size(); ++k) {
    if (result.groups[result.output_group[k]].size() >= 2 &&
        (!config.keep_originals || k >= parts.size())) {
      result.merged.push_back(result.output[k]);
    }
  }
  return result;
}

}  // namespace udos::grouping

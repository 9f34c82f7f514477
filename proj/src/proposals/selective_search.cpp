#include "udos/proposals/selective_search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>

#include "udos/maskcore/error.hpp"

namespace udos::proposals {

void SimilarityWeights::validate() const {
  for (double v : {color, texture, size, fill}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("similarity weights must lie in [0, 1]");
    }
  }
  if (color + texture + size + fill <= 0.0) {
    throw InvalidArgument("at least one similarity weight must be positive");
  }
}

namespace {

double intersect(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::min(a[i], b[i]);
  return s;
}

void normalize(std::vector<double>& hist) {
  double sum = 0.0;
  for (double v : hist) sum += v;
  if (sum > 0.0) {
    for (double& v : hist) v /= sum;
  }
}

// Magnitude cap for gradient histograms on [0, 1] intensities.
constexpr double kGradientCap = 0.3;
constexpr double kTextureSigma = 1.0;

}  // namespace

double color_similarity(const Region& a, const Region& b) {
  return intersect(a.color_hist, b.color_hist);
}

double texture_similarity(const Region& a, const Region& b) {
  return intersect(a.texture_hist, b.texture_hist);
}

double size_similarity(const Region& a, const Region& b, int64_t image_area) {
  return 1.0 - static_cast<double>(a.pixel_count + b.pixel_count) /
                   static_cast<double>(image_area);
}

double fill_similarity(const Region& a, const Region& b, int64_t image_area) {
  const double hull = box_hull(a.box, b.box).area();
  return 1.0 - (hull - static_cast<double>(a.pixel_count + b.pixel_count)) /
                   static_cast<double>(image_area);
}

double region_similarity(const Region& a, const Region& b, int64_t image_area,
                         const SimilarityWeights& weights) {
  double s = 0.0;
  if (weights.color > 0.0) s += weights.color * color_similarity(a, b);
  if (weights.texture > 0.0) s += weights.texture * texture_similarity(a, b);
  if (weights.size > 0.0) s += weights.size * size_similarity(a, b, image_area);
  if (weights.fill > 0.0) s += weights.fill * fill_similarity(a, b, image_area);
  return s / (weights.color + weights.texture + weights.size + weights.fill);
}

std::vector<Region> initial_regions(const RgbImage& image, const LabelMap& labels) {
  const int h = image.height;
  const int w = image.width;
  const int n = labels.num_regions;
  std::vector<Region> regions(n);
  std::vector<std::array<int, 4>> bounds(n, {w, h, -1, -1});
  std::vector<std::set<int>> nbrs(n);

  for (int r = 0; r < n; ++r) {
    regions[r].id = r;
    regions[r].pixel_count = labels.sizes[r];
    regions[r].color_hist.assign(kColorHistSize, 0.0);
    regions[r].texture_hist.assign(kTextureHistSize, 0.0);
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int r = labels.at(y, x);
      auto& b = bounds[r];
      b[0] = std::min(b[0], x);
      b[1] = std::min(b[1], y);
      b[2] = std::max(b[2], x);
      b[3] = std::max(b[3], y);
      if (x + 1 < w && labels.at(y, x + 1) != r) {
        nbrs[r].insert(labels.at(y, x + 1));
        nbrs[labels.at(y, x + 1)].insert(r);
      }
      if (y + 1 < h && labels.at(y + 1, x) != r) {
        nbrs[r].insert(labels.at(y + 1, x));
        nbrs[labels.at(y + 1, x)].insert(r);
      }
      for (int c = 0; c < 3; ++c) {
        const int bin = image.at(y, x, c) * kColorBins / 256;
        regions[r].color_hist[c * kColorBins + bin] += 1.0;
      }
    }
  }

  // Texture: directional derivatives of the smoothed channels at 0, 45, 90
  // and 135 degrees; positive and negative responses form 8 orientations.
  std::vector<float> unit(image.pixels.size());
  for (size_t i = 0; i < unit.size(); ++i) unit[i] = image.pixels[i] / 255.0f;
  const std::vector<float> smooth = gaussian_smooth(unit, h, w, kTextureSigma);
  auto px = [&](int y, int x, int c) {
    y = std::clamp(y, 0, h - 1);
    x = std::clamp(x, 0, w - 1);
    return static_cast<double>(smooth[(static_cast<size_t>(y) * w + x) * 3 + c]);
  };
  std::array<double, 4> cosines{};
  std::array<double, 4> sines{};
  for (int o = 0; o < 4; ++o) {
    cosines[o] = std::cos(o * std::numbers::pi / 4.0);
    sines[o] = std::sin(o * std::numbers::pi / 4.0);
  }
  auto bin_of = [](double magnitude) {
    return std::min(kTextureBins - 1, static_cast<int>(magnitude / kGradientCap * kTextureBins));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto& hist = regions[labels.at(y, x)].texture_hist;
      for (int c = 0; c < 3; ++c) {
        const double dx = (px(y, x + 1, c) - px(y, x - 1, c)) / 2.0;
        const double dy = (px(y + 1, x, c) - px(y - 1, x, c)) / 2.0;
        for (int o = 0; o < 4; ++o) {
          const double d = cosines[o] * dx + sines[o] * dy;
          const int base = c * kTextureOrientations * kTextureBins;
          hist[base + o * kTextureBins + bin_of(std::max(d, 0.0))] += 1.0;
          hist[base + (o + 4) * kTextureBins + bin_of(std::max(-d, 0.0))] += 1.0;
        }
      }
    }
  }

  for (int r = 0; r < n; ++r) {
    normalize(regions[r].color_hist);
    normalize(regions[r].texture_hist);
    const auto& b = bounds[r];
    regions[r].box = Box::from_corners(b[0], b[1], b[2] + 1, b[3] + 1);
    regions[r].neighbors.assign(nbrs[r].begin(), nbrs[r].end());
  }
  return regions;
}

std::vector<int> Hierarchy::leaves(int region) const {
  std::vector<int> out;
  std::vector<int> stack{region};
  while (!stack.empty()) {
    const int r = stack.back();
    stack.pop_back();
    if (r < num_initial) {
      out.push_back(r);
    } else {
      const auto& m = merges[r - num_initial];
      stack.push_back(m[1]);
      stack.push_back(m[0]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

BinaryMask Hierarchy::mask(int region) const {
  std::vector<uint8_t> selected(num_initial, 0);
  for (int leaf : leaves(region)) selected[leaf] = 1;
  return base.mask_of(selected);
}

namespace {

struct Candidate {
  double similarity;
  int lo;
  int hi;
};

struct CandidateOrder {
  // Max-heap on similarity, then smallest (lo, hi).
  bool operator()(const Candidate& l, const Candidate& r) const {
    if (l.similarity != r.similarity) return l.similarity < r.similarity;
    if (l.lo != r.lo) return l.lo > r.lo;
    return l.hi > r.hi;
  }
};

Region merge_regions(const Region& a, const Region& b, int id) {
  Region m;
  m.id = id;
  m.pixel_count = a.pixel_count + b.pixel_count;
  const double wa = static_cast<double>(a.pixel_count) / m.pixel_count;
  const double wb = static_cast<double>(b.pixel_count) / m.pixel_count;
  m.color_hist.resize(a.color_hist.size());
  for (size_t i = 0; i < m.color_hist.size(); ++i) {
    m.color_hist[i] = wa * a.color_hist[i] + wb * b.color_hist[i];
  }
  m.texture_hist.resize(a.texture_hist.size());
  for (size_t i = 0; i < m.texture_hist.size(); ++i) {
    m.texture_hist[i] = wa * a.texture_hist[i] + wb * b.texture_hist[i];
  }
  m.box = box_hull(a.box, b.box);
  std::set_union(a.neighbors.begin(), a.neighbors.end(), b.neighbors.begin(),
                 b.neighbors.end(), std::back_inserter(m.neighbors));
  std::erase_if(m.neighbors, [&](int n) { return n == a.id || n == b.id; });
  return m;
}

}  // namespace

Hierarchy build_hierarchy(const RgbImage& image, const SegParams& params,
                          const SimilarityWeights& weights) {
  weights.validate();
  Hierarchy hier;
  hier.base = graph_segment(image, params);
  hier.num_initial = hier.base.num_regions;
  hier.regions = initial_regions(image, hier.base);
  const int64_t image_area = static_cast<int64_t>(image.height) * image.width;

  std::vector<uint8_t> alive(hier.regions.size(), 1);
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> heap;
  for (const Region& r : hier.regions) {
    for (int n : r.neighbors) {
      if (n > r.id) {
        heap.push({region_similarity(r, hier.regions[n], image_area, weights), r.id, n});
      }
    }
  }

  while (!heap.empty()) {
    const Candidate top = heap.top();
    heap.pop();
    if (!alive[top.lo] || !alive[top.hi]) continue;
    const int id = static_cast<int>(hier.regions.size());
    Region merged = merge_regions(hier.regions[top.lo], hier.regions[top.hi], id);
    alive[top.lo] = 0;
    alive[top.hi] = 0;
    for (int n : merged.neighbors) {
      auto& nb = hier.regions[n].neighbors;
      std::erase_if(nb, [&](int v) { return v == top.lo || v == top.hi; });
      nb.push_back(id);  // id exceeds every existing id, so nb stays sorted
    }
    hier.merges.push_back({top.lo, top.hi});
    hier.merge_similarity.push_back(top.similarity);
    hier.regions.push_back(std::move(merged));
    alive.push_back(1);
    const Region& m = hier.regions.back();
    for (int n : m.neighbors) {
      heap.push({region_similarity(hier.regions[n], m, image_area, weights), n, id});
    }
  }
  return hier;
}

namespace {

struct BoxKey {
  double x1, y1, x2, y2;
  auto operator<=>(const BoxKey&) const = default;
};

BoxKey key_of(const Box& b) {
  const CornerBox c = b.corners();
  return {c.x1, c.y1, c.x2, c.y2};
}

void append_hierarchy(const Hierarchy& hier, std::set<BoxKey>& seen,
                      std::vector<Proposal>& out) {
  for (const Region& r : hier.regions) {
    if (!seen.insert(key_of(r.box)).second) continue;
    BinaryMask mask = hier.mask(r.id);
    Box box = r.box;
    out.push_back(Proposal{box, std::move(mask), 1.0, 1.0, 1.0, Provenance::kUnsupervised});
  }
}

}  // namespace

std::vector<Proposal> selective_search(const RgbImage& image, const SegParams& params,
                                       const SimilarityWeights& weights) {
  return selective_search(image, SelectiveSearchConfig{{params}, weights});
}

std::vector<Proposal> selective_search(const RgbImage& image,
                                       const SelectiveSearchConfig& config) {
  if (image.empty()) throw InvalidArgument("selective_search needs a nonempty image");
  if (config.strategies.empty()) {
    throw InvalidArgument("selective search needs at least one strategy");
  }
  std::set<BoxKey> seen;
  std::vector<Proposal> out;
  for (const SegParams& params : config.strategies) {
    append_hierarchy(build_hierarchy(image, params, config.weights), seen, out);
  }
  return out;
}

std::vector<Proposal> segment_proposals(const RgbImage& image, const SegParams& params) {
  const LabelMap labels = graph_segment(image, params);
  std::vector<Proposal> out;
  out.reserve(labels.num_regions);
  for (int r = 0; r < labels.num_regions; ++r) {
    out.push_back(proposal_from_mask(labels.mask_of(r), Provenance::kUnsupervised));
  }
  return out;
}

}  // namespace udos::proposals

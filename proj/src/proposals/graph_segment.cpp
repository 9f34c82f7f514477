#include "udos/proposals/graph_segment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "udos/maskcore/error.hpp"

namespace udos::proposals {

void SegParams::validate() const {
  if (!(scale_k > 0.0) || !std::isfinite(scale_k)) {
    throw InvalidArgument("segmentation scale k must be > 0");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("segmentation sigma must be >= 0");
  }
  if (min_size < 1) throw InvalidArgument("segmentation min_size must be >= 1");
}

BinaryMask LabelMap::mask_of(const std::vector<uint8_t>& selected) const {
  RleCounts counts;
  bool current = false;
  uint32_t run = 0;
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) {
      const bool v = selected[labels[static_cast<size_t>(y) * width + x]] != 0;
      if (v != current) {
        counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  counts.push_back(run);
  return BinaryMask::from_rle(height, width, std::move(counts));
}

BinaryMask LabelMap::mask_of(int32_t id) const {
  std::vector<uint8_t> selected(num_regions, 0);
  selected[id] = 1;
  return mask_of(selected);
}

namespace {

struct Edge {
  float weight;
  int32_t a;
  int32_t b;
};

class DisjointSet {
 public:
  explicit DisjointSet(int n) : parent_(n), rank_(n, 0), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    int root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const int next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  int join(int a, int b) {
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    if (rank_[a] == rank_[b]) ++rank_[a];
    return a;
  }

  int64_t size(int root) const { return size_[root]; }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
  std::vector<int64_t> size_;
};

}  // namespace

LabelMap graph_segment(const RgbImage& image, const SegParams& params) {
  params.validate();
  if (image.empty()) throw InvalidArgument("graph_segment needs a nonempty image");
  const int h = image.height;
  const int w = image.width;

  std::vector<float> rgb(image.pixels.begin(), image.pixels.end());
  const std::vector<float> smooth = gaussian_smooth(rgb, h, w, params.sigma);

  auto diff = [&](int y1, int x1, int y2, int x2) {
    const size_t p = (static_cast<size_t>(y1) * w + x1) * 3;
    const size_t q = (static_cast<size_t>(y2) * w + x2) * 3;
    const float dr = smooth[p] - smooth[q];
    const float dg = smooth[p + 1] - smooth[q + 1];
    const float db = smooth[p + 2] - smooth[q + 2];
    return std::sqrt(dr * dr + dg * dg + db * db);
  };

  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(h) * w * 4);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int32_t p = y * w + x;
      if (x + 1 < w) edges.push_back({diff(y, x, y, x + 1), p, p + 1});
      if (y + 1 < h) edges.push_back({diff(y, x, y + 1, x), p, p + w});
      if (x + 1 < w && y + 1 < h) edges.push_back({diff(y, x, y + 1, x + 1), p, p + w + 1});
      if (x + 1 < w && y > 0) edges.push_back({diff(y, x, y - 1, x + 1), p, p - w + 1});
    }
  }
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge& l, const Edge& r) { return l.weight < r.weight; });

  const int n = h * w;
  DisjointSet sets(n);
  std::vector<double> threshold(n, params.scale_k);
  for (const Edge& e : edges) {
    int a = sets.find(e.a);
    int b = sets.find(e.b);
    if (a == b) continue;
    if (e.weight <= threshold[a] && e.weight <= threshold[b]) {
      const int root = sets.join(a, b);
      threshold[root] = e.weight + params.scale_k / static_cast<double>(sets.size(root));
    }
  }
  for (const Edge& e : edges) {
    const int a = sets.find(e.a);
    const int b = sets.find(e.b);
    if (a != b && (sets.size(a) < params.min_size || sets.size(b) < params.min_size)) {
      sets.join(a, b);
    }
  }

  LabelMap out;
  out.height = h;
  out.width = w;
  out.labels.assign(n, -1);
  std::vector<int32_t> id_of_root(n, -1);
  for (int p = 0; p < n; ++p) {
    const int root = sets.find(p);
    if (id_of_root[root] < 0) {
      id_of_root[root] = out.num_regions++;
      out.sizes.push_back(0);
    }
    out.labels[p] = id_of_root[root];
    ++out.sizes[id_of_root[root]];
  }
  return out;
}

}  // namespace udos::proposals

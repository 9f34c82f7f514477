#include <fstream>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "udos/maskcore/error.hpp"
#include "udos/maskcore/json_codec.hpp"
#include "udos/maskcore/mask.hpp"
#include "udos/maskcore/proposal.hpp"

using namespace udos;

namespace {

std::vector<uint8_t> random_dense(std::mt19937_64& rng, int h, int w, double p) {
  std::bernoulli_distribution bit(p);
  std::vector<uint8_t> d(static_cast<size_t>(h) * w);
  for (auto& v : d) v = bit(rng) ? 1 : 0;
  return d;
}

// Pixel-count oracle over dense rasters.
double dense_iou(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
  int64_t inter = 0, uni = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] && b[i]);
    uni += (a[i] || b[i]);
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

BinaryMask square(int h, int w, int x, int y, int side_x, int side_y) {
  return BinaryMask::from_rect(h, w, x, y, x + side_x, y + side_y);
}

}  // namespace

TEST_CASE("mask_iou examples") {
  const BinaryMask a = square(30, 30, 0, 0, 10, 10);
  CHECK(mask_iou(a, a) == 1.0);
  const BinaryMask far = square(30, 30, 20, 20, 10, 10);
  CHECK(mask_iou(a, far) == 0.0);

  // 10x10 squares overlapping in a 5x10 strip.
  const BinaryMask b = square(30, 30, 5, 0, 10, 10);
  const double oracle = dense_iou(a.to_dense(), b.to_dense());
  CHECK(oracle == doctest::Approx(50.0 / 150.0).epsilon(1e-15));
  CHECK(mask_iou(a, b) == oracle);

  const BinaryMask empty(30, 30);
  CHECK(mask_iou(empty, empty) == 0.0);
  CHECK(mask_iou(a, empty) == 0.0);
}

TEST_CASE("mask_iou rejects mismatched rasters") {
  CHECK_THROWS_AS(mask_iou(BinaryMask(4, 5), BinaryMask(5, 4)), DimensionMismatch);
}

TEST_CASE("box_iou examples") {
  const Box a = Box::from_corners(0, 0, 10, 10);
  CHECK(box_iou(a, a) == 1.0);
  CHECK(box_iou(a, Box::from_corners(10, 0, 20, 10)) == 0.0);
  CHECK(box_iou(a, Box::from_corners(5, 0, 15, 10)) == doctest::Approx(50.0 / 150.0).epsilon(1e-15));
  CHECK(box_iou(a, Box::from_corners(30, 30, 40, 40)) == 0.0);
}

TEST_CASE("box invariants") {
  CHECK_THROWS_AS(Box(1, 1, 0, 3), InvalidArgument);
  CHECK_THROWS_AS(Box(1, 1, 2, -1), InvalidArgument);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coord(-50, 50);
  for (int i = 0; i < 200; ++i) {
    const double x1 = coord(rng) / 2.0, y1 = coord(rng) / 2.0;
    const double x2 = x1 + 0.5 + std::abs(coord(rng)), y2 = y1 + 0.5 + std::abs(coord(rng));
    const Box b = Box::from_corners(x1, y1, x2, y2);
    CHECK(b.corners() == CornerBox{x1, y1, x2, y2});
    auto clipped = b.clipped(20, 15);
    if (clipped) {
      const CornerBox c = clipped->corners();
      CHECK(c.x1 >= 0);
      CHECK(c.y1 >= 0);
      CHECK(c.x2 <= 20);
      CHECK(c.y2 <= 15);
    }
  }
}

TEST_CASE("mask_union examples") {
  const BinaryMask a = square(20, 20, 2, 2, 5, 1);
  CHECK(mask_union(std::vector{a}) == a);
  CHECK(mask_union(std::vector{a, a}) == a);
  const BinaryMask b = square(20, 20, 10, 10, 7, 1);
  CHECK(a.area() == 5);
  CHECK(b.area() == 7);
  CHECK(mask_union(std::vector{a, b}).area() == 12);
  CHECK_THROWS_AS(mask_union(std::vector<BinaryMask>{}), InvalidArgument);
  CHECK_THROWS_AS(mask_union(std::vector{a, BinaryMask(20, 21)}), DimensionMismatch);
}

TEST_CASE("rle examples") {
  // (row1,col0) and (row0,col1) set: column-major order 0,1,1,0.
  const std::vector<uint8_t> dense{0, 1, 1, 0};
  CHECK(rle_encode(2, 2, dense) == RleCounts{1, 2, 1});
  CHECK(rle_encode(3, 5, std::vector<uint8_t>(15, 0)) == RleCounts{15});
  CHECK(rle_decode(2, 2, RleCounts{1, 2, 1}) == dense);
  CHECK_THROWS_AS(rle_decode(2, 2, RleCounts{1, 2}), FormatError);
  CHECK_THROWS_AS(BinaryMask::from_rle(2, 2, RleCounts{1, 2, 2}), FormatError);
}

TEST_CASE("rle round trip and count sum on random masks") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const int h = 1 + static_cast<int>(rng() % 40);
    const int w = 1 + static_cast<int>(rng() % 40);
    const auto dense = random_dense(rng, h, w, (rng() % 100) / 100.0);
    const RleCounts counts = rle_encode(h, w, dense);
    uint64_t sum = 0;
    for (uint32_t c : counts) sum += c;
    CHECK(sum == static_cast<uint64_t>(h) * w);
    CHECK(rle_decode(h, w, counts) == dense);
    CHECK(rle_from_string(rle_to_string(counts)) == counts);
    const BinaryMask m = BinaryMask::from_dense(h, w, dense);
    CHECK(m.to_dense() == dense);
    CHECK(BinaryMask::from_rle(h, w, m.counts()) == m);
  }
}

TEST_CASE("COCO fixtures round trip bit-exactly") {
  std::ifstream in(std::string(UDOS_FIXTURE_DIR) + "/rle_fixtures.json");
  REQUIRE(in.good());
  const nlohmann::json fixtures = nlohmann::json::parse(in);
  int checked = 0;
  for (const auto& c : fixtures.at("cases")) {
    const int h = c["size"][0];
    const int w = c["size"][1];
    std::vector<uint8_t> dense;
    for (const auto& row : c["rows"]) {
      for (char ch : row.get<std::string>()) dense.push_back(ch == '1');
    }
    const RleCounts expected = c["counts"].get<RleCounts>();
    const std::string compressed = c["compressed"];
    CAPTURE(compressed);

    CHECK(rle_encode(h, w, dense) == expected);
    CHECK(rle_to_string(expected) == compressed);
    CHECK(rle_from_string(compressed) == expected);

    const BinaryMask m = mask_from_json({{"size", {h, w}}, {"counts", compressed}});
    CHECK(m.to_dense() == dense);
    CHECK(m.area() == c["area"].get<int64_t>());
    CHECK(mask_to_json(m).dump() ==
          nlohmann::json({{"size", {h, w}}, {"counts", compressed}}).dump());
    CHECK(mask_to_json(m, false)["counts"].get<RleCounts>() == expected);
    if (m.area() > 0) {
      CHECK(m.tight_box()->xywh() == c["bbox"].get<std::array<double, 4>>());
    } else {
      CHECK_FALSE(m.tight_box().has_value());
    }
    ++checked;
  }
  CHECK(checked == 13);
}

TEST_CASE("compressed RLE rejects garbage") {
  CHECK_THROWS_AS(rle_from_string("1 2"), FormatError);
  CHECK_THROWS_AS(rle_from_string("h"), FormatError);  // continuation with no follow-up
  CHECK_THROWS_AS(mask_from_json({{"size", {2, 2}}, {"counts", "0"}}), FormatError);
  CHECK_THROWS_AS(mask_from_json({{"size", {2}}, {"counts", "4"}}), SchemaError);
  CHECK_THROWS_AS(mask_from_json(nlohmann::json::array()), SchemaError);
}

TEST_CASE("IoU and union properties on random masks") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 60; ++i) {
    const int h = 5 + static_cast<int>(rng() % 20);
    const int w = 5 + static_cast<int>(rng() % 20);
    const auto da = random_dense(rng, h, w, 0.2);
    const auto db = random_dense(rng, h, w, 0.4);
    const auto dc = random_dense(rng, h, w, 0.1);
    const BinaryMask a = BinaryMask::from_dense(h, w, da);
    const BinaryMask b = BinaryMask::from_dense(h, w, db);
    const BinaryMask c = BinaryMask::from_dense(h, w, dc);

    CHECK(mask_iou(a, b) == mask_iou(b, a));
    CHECK(mask_iou(a, b) == doctest::Approx(dense_iou(da, db)).epsilon(1e-12));
    if (!a.empty()) CHECK(mask_iou(a, a) == 1.0);

    const BinaryMask ab = mask_union(std::vector{a, b});
    CHECK(ab == mask_union(std::vector{b, a}));
    CHECK(mask_union(std::vector{ab, c}) == mask_union(std::vector{a, mask_union(std::vector{b, c})}));
    CHECK(mask_union(std::vector{ab, ab}) == ab);
    CHECK(ab.area() >= std::max(a.area(), b.area()));

    auto ta = a.tight_box();
    auto tb = b.tight_box();
    if (ta && tb) {
      CHECK(*ab.tight_box() == box_hull(*ta, *tb));
    }
    if (ta) {
      // Tight box contains every foreground pixel and lies inside the image.
      const CornerBox cb = ta->corners();
      CHECK(cb.x1 >= 0);
      CHECK(cb.y1 >= 0);
      CHECK(cb.x2 <= w);
      CHECK(cb.y2 <= h);
      int64_t inside = 0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (da[y * w + x] && x >= cb.x1 && x < cb.x2 && y >= cb.y1 && y < cb.y2) ++inside;
        }
      }
      CHECK(inside == a.area());
    }
  }
}

TEST_CASE("proposal from mask and provenance names") {
  const BinaryMask m = square(10, 10, 2, 3, 4, 5);
  const Proposal p = proposal_from_mask(m, Provenance::kGrouped);
  CHECK(p.box == Box::from_corners(2, 3, 6, 8));
  CHECK_THROWS_AS(proposal_from_mask(BinaryMask(3, 3), Provenance::kPart), InvalidArgument);
  for (auto prov : {Provenance::kPart, Provenance::kGrouped, Provenance::kGroundTruth,
                    Provenance::kUnsupervised}) {
    CHECK(parse_provenance(provenance_name(prov)) == prov);
  }
  CHECK_THROWS_AS(parse_provenance("mystery"), FormatError);
}

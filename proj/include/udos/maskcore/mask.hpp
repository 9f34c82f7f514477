#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "udos/maskcore/box.hpp"

namespace udos {

using RleCounts = std::vector<uint32_t>;

// Column-major run lengths, first run is background (possibly 0).
RleCounts rle_encode(int height, int width, std::span<const uint8_t> dense);
// Returns a row-major 0/1 raster. Throws FormatError when the counts do not
// sum to height * width.
std::vector<uint8_t> rle_decode(int height, int width, std::span<const uint32_t> counts);

// COCO compressed-counts string: 5-bit groups, 0x20 continuation bit, 0x10
// sign bit, offset 48; runs from index 3 on are stored relative to run i-2.
std::string rle_to_string(std::span<const uint32_t> counts);
RleCounts rle_from_string(std::string_view s);

// Binary raster stored as canonical RLE. Immutable after construction.
class BinaryMask {
 public:
  BinaryMask() = default;

  // All-background mask.
  BinaryMask(int height, int width);

  // Row-major raster, any nonzero byte is foreground.
  static BinaryMask from_dense(int height, int width, std::span<const uint8_t> dense);
  static BinaryMask from_rle(int height, int width, RleCounts counts);
  // Half-open pixel rectangle [x1, x2) x [y1, y2), clipped to the raster.
  static BinaryMask from_rect(int height, int width, int x1, int y1, int x2, int y2);

  int height() const { return height_; }
  int width() const { return width_; }
  int64_t area() const { return area_; }
  bool empty() const { return area_ == 0; }
  const RleCounts& counts() const { return counts_; }

  std::vector<uint8_t> to_dense() const;

  // Bounding box of the foreground; nullopt for an empty mask.
  std::optional<Box> tight_box() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  BinaryMask(int height, int width, RleCounts counts, int64_t area)
      : height_(height), width_(width), area_(area), counts_(std::move(counts)) {}

  int height_ = 0;
  int width_ = 0;
  int64_t area_ = 0;
  RleCounts counts_;
};

int64_t intersection_area(const BinaryMask& a, const BinaryMask& b);

// |a & b| / |a | b|, 0 when the union is empty. Throws DimensionMismatch.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

// Pixelwise OR. Throws InvalidArgument on an empty sequence,
// DimensionMismatch on mixed raster sizes.
BinaryMask mask_union(std::span<const BinaryMask> masks);

}  // namespace udos

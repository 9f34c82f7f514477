#pragma once

#include <array>
#include <optional>

namespace udos {

struct CornerBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  friend bool operator==(const CornerBox&, const CornerBox&) = default;
};

// Axis-aligned box in center form. Pixel coverage is half-open: a box with
// corners (x1, y1, x2, y2) covers columns [x1, x2) and rows [y1, y2).
class Box {
 public:
  // Throws InvalidArgument unless w > 0 and h > 0 (and all finite).
  Box(double cx, double cy, double w, double h);

  static Box from_corners(double x1, double y1, double x2, double y2);
  static Box from_corners(const CornerBox& c) {
    return from_corners(c.x1, c.y1, c.x2, c.y2);
  }
  // COCO [x, y, w, h] form.
  static Box from_xywh(double x, double y, double w, double h) {
    return from_corners(x, y, x + w, y + h);
  }

  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double w() const { return w_; }
  double h() const { return h_; }
  double area() const { return w_ * h_; }

  CornerBox corners() const;
  std::array<double, 4> xywh() const;

  // Intersection with [0, width) x [0, height); nullopt when nothing with
  // positive area remains.
  std::optional<Box> clipped(double image_width, double image_height) const;

  bool contains(const Box& other, double slack = 0.0) const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  double cx_, cy_, w_, h_;
};

double box_iou(const Box& a, const Box& b);

// Smallest box containing both.
Box box_hull(const Box& a, const Box& b);

}  // namespace udos

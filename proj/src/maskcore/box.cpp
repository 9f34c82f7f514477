#include "udos/maskcore/box.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "udos/maskcore/error.hpp"

namespace udos {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kFormat: return "format_error";
    case ErrorKind::kSchema: return "schema_error";
    case ErrorKind::kIo: return "io_error";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kUnknownImage: return "unknown_image";
    case ErrorKind::kUnsorted: return "unsorted_predictions";
  }
  return "error";
}

Box::Box(double cx, double cy, double w, double h)
    : cx_(cx), cy_(cy), w_(w), h_(h) {
  if (!(w > 0.0) || !(h > 0.0) || !std::isfinite(cx) || !std::isfinite(cy) ||
      !std::isfinite(w) || !std::isfinite(h)) {
    std::ostringstream os;
    os << "box must have finite center and positive size, got (cx=" << cx
       << ", cy=" << cy << ", w=" << w << ", h=" << h << ")";
    throw InvalidArgument(os.str());
  }
}

Box Box::from_corners(double x1, double y1, double x2, double y2) {
  return Box((x1 + x2) / 2.0, (y1 + y2) / 2.0, x2 - x1, y2 - y1);
}

CornerBox Box::corners() const {
  return {cx_ - w_ / 2.0, cy_ - h_ / 2.0, cx_ + w_ / 2.0, cy_ + h_ / 2.0};
}

std::array<double, 4> Box::xywh() const {
  const CornerBox c = corners();
  return {c.x1, c.y1, w_, h_};
}

std::optional<Box> Box::clipped(double image_width, double image_height) const {
  const CornerBox c = corners();
  const double x1 = std::clamp(c.x1, 0.0, image_width);
  const double y1 = std::clamp(c.y1, 0.0, image_height);
  const double x2 = std::clamp(c.x2, 0.0, image_width);
  const double y2 = std::clamp(c.y2, 0.0, image_height);
  if (!(x2 > x1) || !(y2 > y1)) return std::nullopt;
  return from_corners(x1, y1, x2, y2);
}

bool Box::contains(const Box& other, double slack) const {
  const CornerBox a = corners();
  const CornerBox b = other.corners();
  return b.x1 >= a.x1 - slack && b.y1 >= a.y1 - slack &&
         b.x2 <= a.x2 + slack && b.y2 <= a.y2 + slack;
}

double box_iou(const Box& a, const Box& b) {
  const CornerBox p = a.corners();
  const CornerBox q = b.corners();
  const double iw = std::min(p.x2, q.x2) - std::max(p.x1, q.x1);
  const double ih = std::min(p.y2, q.y2) - std::max(p.y1, q.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

Box box_hull(const Box& a, const Box& b) {
  const CornerBox p = a.corners();
  const CornerBox q = b.corners();
  return Box::from_corners(std::min(p.x1, q.x1), std::min(p.y1, q.y1),
                           std::max(p.x2, q.x2), std::max(p.y2, q.y2));
}

}  // namespace udos

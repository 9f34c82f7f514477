#include "udos/maskcore/json_codec.hpp"

#include "udos/maskcore/error.hpp"

namespace udos {

nlohmann::json mask_to_json(const BinaryMask& mask, bool compressed) {
  nlohmann::json j;
  j["size"] = {mask.height(), mask.width()};
  if (compressed) {
    j["counts"] = rle_to_string(mask.counts());
  } else {
    j["counts"] = mask.counts();
  }
  return j;
}

BinaryMask mask_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("size") || !j.contains("counts")) {
    throw SchemaError("segmentation must be an RLE object with 'size' and 'counts'");
  }
  const auto& size = j.at("size");
  if (!size.is_array() || size.size() != 2 || !size[0].is_number_integer() ||
      !size[1].is_number_integer()) {
    throw SchemaError("segmentation 'size' must be [height, width]");
  }
  const int h = size[0].get<int>();
  const int w = size[1].get<int>();
  const auto& counts = j.at("counts");
  if (counts.is_string()) {
    return BinaryMask::from_rle(h, w, rle_from_string(counts.get<std::string>()));
  }
  if (counts.is_array()) {
    RleCounts c;
    c.reserve(counts.size());
    for (const auto& v : counts) {
      if (!v.is_number_integer() || v.get<int64_t>() < 0) {
        throw SchemaError("uncompressed RLE counts must be non-negative integers");
      }
      c.push_back(v.get<uint32_t>());
    }
    return BinaryMask::from_rle(h, w, std::move(c));
  }
  throw SchemaError("segmentation 'counts' must be a string or an integer array");
}

nlohmann::json box_to_xywh_json(const Box& box) {
  const auto v = box.xywh();
  return {v[0], v[1], v[2], v[3]};
}

Box box_from_xywh_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw SchemaError("bbox must be [x, y, w, h]");
  for (const auto& v : j) {
    if (!v.is_number()) throw SchemaError("bbox entries must be numbers");
  }
  try {
    return Box::from_xywh(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                          j[3].get<double>());
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("invalid bbox: ") + e.what());
  }
}

}  // namespace udos

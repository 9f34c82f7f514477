#pragma once

#include "json.hpp"

#include "udos/maskcore/box.hpp"
#include "udos/maskcore/mask.hpp"

namespace udos {

// {"size": [h, w], "counts": "<compressed>"} or, uncompressed,
// {"size": [h, w], "counts": [ints]}.
nlohmann::json mask_to_json(const BinaryMask& mask, bool compressed = true);
// Accepts either counts variant. Throws SchemaError / FormatError.
BinaryMask mask_from_json(const nlohmann::json& j);

nlohmann::json box_to_xywh_json(const Box& box);
Box box_from_xywh_json(const nlohmann::json& j);

}  // namespace udos

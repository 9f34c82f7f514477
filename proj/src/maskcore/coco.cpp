#include "udos/maskcore/coco.hpp"

#include <fstream>
#include <sstream>

#include "udos/maskcore/error.hpp"
#include "udos/maskcore/json_codec.hpp"

namespace udos {

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

int64_t require_int(const nlohmann::json& j, const char* key, const std::string& where) {
  const auto& v = require(j, key, where);
  if (!v.is_number_integer()) throw SchemaError(where + ": field '" + key + "' must be an integer");
  return v.get<int64_t>();
}

void check_schema_version(const nlohmann::json& j, const std::string& where) {
  if (j.contains("schema_version")) {
    const auto& v = j.at("schema_version");
    if (!v.is_number_integer() || v.get<int64_t>() != kSchemaVersion) {
      throw SchemaError(where + ": unsupported schema_version " + v.dump());
    }
  }
}

Box box_or_tight(const nlohmann::json& j, const BinaryMask& mask, const std::string& where) {
  if (j.contains("bbox")) return box_from_xywh_json(j.at("bbox"));
  if (auto tight = mask.tight_box()) return *tight;
  throw SchemaError(where + ": empty mask and no bbox");
}

}  // namespace

const CocoImage* CocoDataset::find_image(int64_t id) const {
  for (const auto& im : images) {
    if (im.id == id) return &im;
  }
  return nullptr;
}

nlohmann::json dataset_to_json(const CocoDataset& dataset) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["categories"] = nlohmann::json::array({{{"id", 1}, {"name", "object"}}});
  j["images"] = nlohmann::json::array();
  for (const auto& im : dataset.images) {
    j["images"].push_back(
        {{"id", im.id}, {"file_name", im.file_name}, {"height", im.height}, {"width", im.width}});
  }
  j["annotations"] = nlohmann::json::array();
  for (const auto& a : dataset.annotations) {
    nlohmann::json e{{"id", a.id},
                     {"image_id", a.image_id},
                     {"category_id", 1},
                     {"bbox", box_to_xywh_json(a.box)},
                     {"area", a.mask.area()},
                     {"segmentation", mask_to_json(a.mask)},
                     {"iscrowd", 0},
                     {"provenance", provenance_name(a.provenance)}};
    if (a.ignore) e["ignore"] = 1;
    j["annotations"].push_back(std::move(e));
  }
  return j;
}

CocoDataset dataset_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("annotation file must be a JSON object");
  check_schema_version(j, "annotation file");
  CocoDataset d;
  const auto& images = require(j, "images", "annotation file");
  if (!images.is_array()) throw SchemaError("annotation file: 'images' must be an array");
  for (size_t i = 0; i < images.size(); ++i) {
    const std::string where = "images[" + std::to_string(i) + "]";
    CocoImage im;
    im.id = require_int(images[i], "id", where);
    im.height = static_cast<int>(require_int(images[i], "height", where));
    im.width = static_cast<int>(require_int(images[i], "width", where));
    if (images[i].contains("file_name")) im.file_name = images[i].at("file_name").get<std::string>();
    if (d.find_image(im.id)) throw SchemaError(where + ": duplicate image id " + std::to_string(im.id));
    d.images.push_back(std::move(im));
  }
  const auto& anns = require(j, "annotations", "annotation file");
  if (!anns.is_array()) throw SchemaError("annotation file: 'annotations' must be an array");
  for (size_t i = 0; i < anns.size(); ++i) {
    const auto& a = anns[i];
    const std::string where = "annotations[" + std::to_string(i) + "]";
    const int64_t id = a.contains("id") ? require_int(a, "id", where) : static_cast<int64_t>(i + 1);
    const int64_t image_id = require_int(a, "image_id", where);
    const CocoImage* im = d.find_image(image_id);
    if (!im) throw SchemaError(where + ": unknown image_id " + std::to_string(image_id));
    const auto& seg = require(a, "segmentation", where);
    if (seg.is_array()) throw SchemaError(where + ": polygon segmentations are not supported, use RLE");
    BinaryMask mask = mask_from_json(seg);
    if (mask.height() != im->height || mask.width() != im->width) {
      std::ostringstream os;
      os << where << ": mask is " << mask.height() << "x" << mask.width() << " but image "
         << im->id << " is " << im->height << "x" << im->width;
      throw DimensionMismatch(os.str());
    }
    const auto flag = [&](const char* key) {
      return a.contains(key) && a.at(key).is_number() && a.at(key).get<double>() != 0.0;
    };
    Provenance provenance = Provenance::kGroundTruth;
    if (a.contains("provenance")) {
      try {
        provenance = parse_provenance(a.at("provenance").get<std::string>());
      } catch (const FormatError& e) {
        throw SchemaError(where + ": " + e.what());
      }
    }
    CocoAnnotation ann{id,
                       image_id,
                       box_or_tight(a, mask, where),
                       std::move(mask),
                       flag("ignore") || flag("iscrowd"),
                       provenance};
    d.annotations.push_back(std::move(ann));
  }
  return d;
}

LabelSet labels_for_image(const CocoDataset& dataset, int64_t image_id) {
  LabelSet out;
  for (const auto& a : dataset.annotations) {
    if (a.image_id != image_id) continue;
    out.entries.push_back(Proposal{a.box, a.mask, 1.0, 1.0, 1.0, a.provenance});
  }
  return out;
}

nlohmann::json results_to_json(const std::vector<CocoResult>& results) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : results) {
    arr.push_back({{"image_id", r.image_id},
                   {"category_id", 1},
                   {"bbox", box_to_xywh_json(r.box)},
                   {"segmentation", mask_to_json(r.mask)},
                   {"score", r.score}});
  }
  return {{"schema_version", kSchemaVersion}, {"results", std::move(arr)}};
}

std::vector<CocoResult> results_from_json(const nlohmann::json& j) {
  const nlohmann::json* arr = &j;
  if (j.is_object()) {
    check_schema_version(j, "results file");
    arr = &require(j, "results", "results file");
  }
  if (!arr->is_array()) throw SchemaError("results file: expected an array of results");
  std::vector<CocoResult> out;
  out.reserve(arr->size());
  for (size_t i = 0; i < arr->size(); ++i) {
    const auto& r = (*arr)[i];
    const std::string where = "results[" + std::to_string(i) + "]";
    const int64_t image_id = require_int(r, "image_id", where);
    const auto& score = require(r, "score", where);
    if (!score.is_number()) throw SchemaError(where + ": 'score' must be a number");
    BinaryMask mask = mask_from_json(require(r, "segmentation", where));
    CocoResult res{image_id, box_or_tight(r, mask, where), std::move(mask), score.get<double>()};
    out.push_back(std::move(res));
  }
  return out;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": invalid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j, int indent) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(indent) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace udos

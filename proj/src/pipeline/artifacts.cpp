#include "udos/pipeline/artifacts.hpp"

#include <sstream>

#include "udos/maskcore/error.hpp"
#include "udos/maskcore/json_codec.hpp"

namespace udos::pipeline {

nlohmann::json proposal_file_to_json(const ProposalFile& file) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = file.kind;
  j["image_dir"] = file.image_dir;
  j["images"] = nlohmann::json::array();
  for (const auto& ip : file.images) {
    nlohmann::json im{{"image_id", ip.image.id},
                      {"file_name", ip.image.file_name},
                      {"height", ip.image.height},
                      {"width", ip.image.width}};
    im["proposals"] = nlohmann::json::array();
    for (size_t k = 0; k < ip.proposals.size(); ++k) {
      const Proposal& p = ip.proposals[k];
      nlohmann::json e{{"bbox", box_to_xywh_json(p.box)},
                       {"segmentation", mask_to_json(p.mask)},
                       {"score_c", p.score_c},
                       {"score_b", p.score_b},
                       {"score_m", p.score_m},
                       {"provenance", provenance_name(p.provenance)}};
      if (k < ip.group_ids.size()) e["group"] = ip.group_ids[k];
      im["proposals"].push_back(std::move(e));
    }
    if (!ip.groups.empty()) im["groups"] = ip.groups;
    if (ip.affinity) {
      nlohmann::json rows = nlohmann::json::array();
      for (int r = 0; r < ip.affinity->n; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < ip.affinity->n; ++c) row.push_back(ip.affinity->at(r, c));
        rows.push_back(std::move(row));
      }
      im["affinity"] = std::move(rows);
    }
    j["images"].push_back(std::move(im));
  }
  return j;
}

namespace {

double score_field(const nlohmann::json& e, const char* key, const std::string& where) {
  if (!e.contains(key)) return 1.0;
  const auto& v = e.at(key);
  if (!v.is_number()) throw SchemaError(where + ": '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!(d >= 0.0 && d <= 1.0)) throw SchemaError(where + ": '" + key + "' outside [0, 1]");
  return d;
}

}  // namespace

ProposalFile proposal_file_from_json(const nlohmann::json& j) {
  ProposalFile f;
  try {
    if (!j.is_object()) throw SchemaError("proposal file must be a JSON object");
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw SchemaError("proposal file: unsupported schema_version " + j.at("schema_version").dump());
    }
    f.kind = j.at("kind").get<std::string>();
    f.image_dir = j.value("image_dir", std::string());
    const auto& images = j.at("images");
    if (!images.is_array()) throw SchemaError("proposal file: 'images' must be an array");
    for (size_t i = 0; i < images.size(); ++i) {
      const auto& im = images[i];
      ImageProposals ip;
      ip.image.id = im.at("image_id").get<int64_t>();
      ip.image.file_name = im.value("file_name", std::string());
      ip.image.height = im.at("height").get<int>();
      ip.image.width = im.at("width").get<int>();
      const auto& props = im.at("proposals");
      bool any_group = false;
      for (size_t k = 0; k < props.size(); ++k) {
        std::ostringstream where;
        where << "images[" << i << "].proposals[" << k << "]";
        const auto& e = props[k];
        BinaryMask mask = mask_from_json(e.at("segmentation"));
        if (mask.height() != ip.image.height || mask.width() != ip.image.width) {
          throw DimensionMismatch(where.str() + ": mask size does not match image " +
                                  std::to_string(ip.image.id));
        }
        Box box = box_from_xywh_json(e.at("bbox"));
        Provenance prov = Provenance::kPart;
        if (e.contains("provenance")) {
          try {
            prov = parse_provenance(e.at("provenance").get<std::string>());
          } catch (const FormatError& err) {
            throw SchemaError(where.str() + ": " + err.what());
          }
        }
        ip.proposals.push_back(Proposal{box, std::move(mask), score_field(e, "score_c", where.str()),
                                        score_field(e, "score_b", where.str()),
                                        score_field(e, "score_m", where.str()), prov});
        if (e.contains("group")) {
          if (k != ip.group_ids.size()) throw SchemaError(where.str() + ": 'group' must be set on all or none");
          ip.group_ids.push_back(e.at("group").get<int>());
          any_group = true;
        }
      }
      if (any_group && ip.group_ids.size() != ip.proposals.size()) {
        throw SchemaError("images[" + std::to_string(i) + "]: 'group' must be set on all or none");
      }
      if (im.contains("groups")) ip.groups = im.at("groups").get<std::vector<std::vector<int>>>();
      if (im.contains("affinity")) {
        const auto rows = im.at("affinity").get<std::vector<std::vector<double>>>();
        grouping::AffinityMatrix a;
        a.n = static_cast<int>(rows.size());
        for (const auto& r : rows) {
          if (r.size() != rows.size()) throw SchemaError("images[" + std::to_string(i) + "]: affinity must be square");
          a.values.insert(a.values.end(), r.begin(), r.end());
        }
        ip.affinity = std::move(a);
      }
      f.images.push_back(std::move(ip));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("proposal file: ") + e.what());
  }
  return f;
}

std::map<int64_t, LabelSet> label_sets(const ProposalFile& file) {
  std::map<int64_t, LabelSet> out;
  for (const auto& ip : file.images) out[ip.image.id].entries = ip.proposals;
  return out;
}

}  // namespace udos::pipeline

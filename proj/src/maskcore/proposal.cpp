#include "udos/maskcore/proposal.hpp"

#include <string>

#include "udos/maskcore/error.hpp"

namespace udos {

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kPart: return "part";
    case Provenance::kGrouped: return "grouped";
    case Provenance::kGroundTruth: return "ground_truth";
    case Provenance::kUnsupervised: return "unsupervised";
  }
  return "part";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "part") return Provenance::kPart;
  if (name == "grouped") return Provenance::kGrouped;
  if (name == "ground_truth") return Provenance::kGroundTruth;
  if (name == "unsupervised") return Provenance::kUnsupervised;
  throw FormatError("unknown provenance '" + std::string(name) + "'");
}

Proposal proposal_from_mask(BinaryMask mask, Provenance provenance) {
  std::optional<Box> box = mask.tight_box();
  if (!box) throw InvalidArgument("cannot build a proposal from an empty mask");
  return Proposal{*box, std::move(mask), 1.0, 1.0, 1.0, provenance};
}

}  // namespace udos

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "udos/maskcore/box.hpp"
#include "udos/maskcore/mask.hpp"

namespace udos {

enum class Provenance { kPart, kGrouped, kGroundTruth, kUnsupervised };

std::string_view provenance_name(Provenance p);
// Throws FormatError for unknown names.
Provenance parse_provenance(std::string_view name);

// One detection candidate. Score components are the classification score
// (c), box quality (b) and mask quality (m), each in [0, 1].
struct Proposal {
  Box box;
  BinaryMask mask;
  double score_c = 1.0;
  double score_b = 1.0;
  double score_m = 1.0;
  Provenance provenance = Provenance::kPart;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

// Proposal whose box is the tight box of the mask. Throws InvalidArgument
// for an empty mask.
Proposal proposal_from_mask(BinaryMask mask, Provenance provenance);

struct LabelSet {
  std::vector<Proposal> entries;
};

}  // namespace udos

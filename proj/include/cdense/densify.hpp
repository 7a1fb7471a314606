#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdense/discretize.hpp"

namespace cdense {

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Value read off the threshold tables: inf of the <=-set, and the distance
// to the sup of the >=-set.
struct DerivedValue {
  Rational value;
  Rational gap;
};

/// Throws DecodeError when a set is empty, the sets cross, or the gap exceeds 1/L.
DerivedValue derived_value(const DiscreteStructure& D, int formula, std::size_t tuple);

struct DerivedMetric {
  std::size_t n = 0;
  std::vector<Rational> values;  // n*n
  std::vector<Rational> gaps;

  const Rational& at(std::size_t a, std::size_t b) const { return values[a * n + b]; }
  bool exact() const;
};

DerivedMetric derived_metric(const DiscreteStructure& D);
/// Per relation, per tuple. Requires the atom R(x0, .., x_{m-1}) in the fragment.
std::vector<std::vector<DerivedValue>> derived_relations(const DiscreteStructure& D);

struct DerivedModuli {
  std::vector<ModulusTable> functions;
  std::vector<ModulusTable> relations;
};

/// Per grid r, the least grid s at which the continuity implication fails
/// (1 if none does).
DerivedModuli derived_moduli(const DiscreteStructure& D);

/// Requires gap 0 everywhere; the result passes metric and continuity checks.
ContinuousStructure decode(const DiscreteStructure& D);

/// Exact value located by a Stern-Brocot descent that asks only threshold
/// questions; checks that the >=-set is [0, v] and the <=-set is [v, 1] on the grid.
struct SupInfResult {
  Rational sup_geq;
  Rational inf_leq;
  bool equal = false;
};
SupInfResult sup_inf_exact(const DiscreteStructure& D, int formula, std::size_t tuple);
/// Grid version: sup of >=-set and inf of <=-set from the bits alone.
SupInfResult sup_inf_grid(const DiscreteStructure& D, int formula, std::size_t tuple);

struct RoundtripReport {
  bool decode_identity = false;  // decode(materialize(encode(M))) == M
  bool encode_identity = false;  // materialize(encode(decode(D))) == D
  std::string clause;            // first failing clause, empty on pass
  std::string detail;
  bool pass() const { return decode_identity && encode_identity; }
};

RoundtripReport roundtrip_check(const ContinuousStructure& M, const DiscreteSignatureFragment& sigf);

/// nullopt when A is a tau+-substructure of B (elements matched by name), else the reason.
std::optional<std::string> substructure_mismatch(const DiscreteStructure& A, const DiscreteStructure& B);

struct InessentialResult {
  bool ok = true;
  std::string element;  // failing b
  int n = 0;            // failing depth
};

/// Every b in B has some a in A with d(b, a) <= the largest grid value below 1/n, n <= depth.
InessentialResult is_inessential_extension(const DiscreteStructure& A, const DiscreteStructure& B, int depth);

struct ClauseResult {
  std::string clause;
  bool pass = false;
  std::string detail;
};

struct TfaeReport {
  std::vector<ClauseResult> clauses;
  bool pass() const;
};

TfaeReport check_tfae_witness(const DiscreteStructure& A, const DiscreteStructure& B, const DiscreteStructure& C,
                              int depth);

struct LevelFamily {
  std::vector<DiscreteStructure> levels;
  Rational rate{1, 2};
};

struct CompletableVerdict {
  bool pass = true;
  int depth = 0;
  std::size_t comparisons = 0;
  std::string witness;
};

CompletableVerdict check_completable(const LevelFamily& fam, int depth);

}  // namespace cdense

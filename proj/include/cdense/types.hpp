#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdense/discretize.hpp"

namespace cdense {

// One threshold fact of a quantifier-free type. Pattern entries index the
// combined list (subject ++ parameters); at least one entry is a subject slot.
struct QfFact {
  int formula;
  std::vector<int> pattern;
  int grid;
  Dir dir;
  bool value;
  bool operator==(const QfFact&) const = default;
};

struct QfType {
  std::size_t subject_arity = 0;
  std::vector<int> params;
  std::vector<QfFact> facts;
};

QfType qf_type(const DiscreteStructure& D, const std::vector<int>& subject, const std::vector<int>& params);
bool same_type(const DiscreteStructure& D, const std::vector<int>& a, const std::vector<int>& b,
               const std::vector<int>& params);

// "phi(x; b) = 0": subject variables come from the fragment, params name
// the remaining free variables of phi and the elements they are bound to.
struct TypeCondition {
  Formula formula;
  std::vector<std::string> params;
  std::vector<std::string> values;
  bool operator==(const TypeCondition&) const = default;
};

struct ContinuousTypeFragment {
  std::vector<std::string> vars;
  std::vector<TypeCondition> conditions;
  bool operator==(const ContinuousTypeFragment&) const = default;
};

/// A subject tuple of M with every condition value 0, if any.
std::optional<std::vector<int>> realized_in(const ContinuousStructure& M, const ContinuousTypeFragment& r);

struct SequenceEntry {
  Formula formula;
  std::vector<std::string> params;
  std::vector<std::vector<std::string>> chain;  // chain[n][k]: element for params[k]
  bool operator==(const SequenceEntry&) const = default;
};

struct SequenceType {
  std::vector<std::string> vars;  // subject variables; arity = vars.size()
  int depth = 0;
  std::vector<SequenceEntry> index;
  std::size_t arity() const { return vars.size(); }
  bool operator==(const SequenceType&) const = default;
};

class UnresolvedChain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chains b_n = first element of B' (universe order) with d(b', b) < 1/2^n.
SequenceType build_sequence_type(const ContinuousTypeFragment& r, const ContinuousStructure& M,
                                 const std::vector<int>& Bprime, int depth);

/// Threshold for entry formulas at step n: min(1, w(2)) at n = 0, else the
/// largest grid value strictly below min(1, w(1/2^(n-1))) (0 when w vanishes).
Rational sequence_threshold(const Formula& f, const Signature& sig, int n, int grid_L);
/// Cauchy step n -> n+1: d(a_{n+1}, a_n) <= 1/2^n.
Rational cauchy_threshold(int n);

struct RealizationResult {
  bool ok = true;
  int step = -1;
  std::string violation;
};

/// candidates[n] is the subject tuple at step n, n = 0..depth.
RealizationResult check_realizes_sequence(const DiscreteStructure& D, const std::vector<std::vector<int>>& candidates,
                                          const SequenceType& st);
/// Exhaustive layered search over all candidate chains.
std::optional<std::vector<std::vector<int>>> find_sequence_realization(const DiscreteStructure& D,
                                                                       const SequenceType& st);

/// Limit of each parameter chain: the element nearest b_N that stays within
/// 1/2^(n-1) of every b_n, n >= 1. Throws UnresolvedChain.
ContinuousTypeFragment limit_type(const SequenceType& st, const DiscreteStructure& D);

SequenceType restrict_sequence_type(const SequenceType& st, const std::vector<std::size_t>& keep);

/// Pair a != b with R_{d<=1/n}(a, b) not false for every n <= N0; the
/// infinitesimal type is realized iff this returns a value.
std::optional<std::pair<int, int>> infinitesimal_witness(const DiscreteStructure& D, int N0);

}  // namespace cdense

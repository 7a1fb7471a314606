#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdense/syntax.hpp"

namespace cdense {

// Tuples over a universe of size n are stored in mixed radix, first
// coordinate most significant. An empty universe has no tuples at all.
std::size_t tuple_count(std::size_t n, int arity);
std::size_t encode_tuple(const int* elems, int arity, std::size_t n);
void decode_tuple(std::size_t idx, int arity, std::size_t n, int* out);
inline std::size_t encode_tuple(const std::vector<int>& elems, std::size_t n) {
  return encode_tuple(elems.data(), static_cast<int>(elems.size()), n);
}
inline std::vector<int> decode_tuple(std::size_t idx, int arity, std::size_t n) {
  std::vector<int> out(arity);
  decode_tuple(idx, arity, n, out.data());
  return out;
}

struct ContinuousStructure {
  Signature sig;
  std::vector<std::string> universe;
  std::vector<Rational> metric;                 // n*n, row-major
  std::vector<std::vector<int>> func_tables;    // per function, n^arity
  std::vector<std::vector<Rational>> rel_tables;  // per relation, n^arity

  std::size_t size() const { return universe.size(); }
  const Rational& d(int a, int b) const { return metric[static_cast<std::size_t>(a) * size() + b]; }
  int element_index(const std::string& name) const;  // -1 if absent
  bool operator==(const ContinuousStructure&) const = default;
};

using Assignment = std::map<std::string, int>;

class UnboundVariable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int eval_term(const ContinuousStructure& M, const Term& t, const Assignment& a);
/// Reference evaluator: recursive, exact, quantifiers as max/min over the universe.
Rational eval(const ContinuousStructure& M, const Formula& f, const Assignment& a);

struct Violation {
  std::string kind;  // identity | symmetry | triangle | range | continuity
  std::string symbol;
  std::vector<std::string> elements;
  std::string detail;
};

std::vector<Violation> check_metric(const ContinuousStructure& M);
std::vector<Violation> check_uniform_continuity(const ContinuousStructure& M);
/// Relation values in [0,1] and table shapes.
std::vector<Violation> check_tables(const ContinuousStructure& M);

class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& msg, std::vector<Violation> v)
      : std::runtime_error(msg), violations(std::move(v)) {}
  std::vector<Violation> violations;
};

/// Runs all checks and throws ValidationError on the first failing group.
void validate_structure(const ContinuousStructure& M);

/// Largest grid delta such that every tuple pair closer than delta (max
/// coordinate distance) has output difference <= r, for every grid r.
ModulusTable measured_modulus(const ContinuousStructure& M, bool is_function, int symbol, int grid_L);

struct Condition {
  Formula formula;  // closed; asserted "= 0"
};

struct ConditionResult {
  std::string formula;
  Rational value;
  bool pass = false;
};

struct TheoryReport {
  std::vector<ConditionResult> results;
  bool pass = true;
};

TheoryReport models_theory(const ContinuousStructure& M, const std::vector<Condition>& T);

class NotSubstructure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ElementarityWitness {
  std::string formula;
  std::vector<std::string> tuple;
  Rational value_in_M;
  Rational value_in_N;
};

struct ElementarityResult {
  bool elementary = true;
  std::optional<ElementarityWitness> witness;
};

/// M must be a tau-substructure of N, matched by element names.
void require_substructure(const ContinuousStructure& M, const ContinuousStructure& N);
ElementarityResult check_phi_elementary(const ContinuousStructure& M, const ContinuousStructure& N,
                                        const std::vector<Formula>& phi);

/// Restriction of M to a subset closed under the functions.
ContinuousStructure restrict_structure(const ContinuousStructure& M, const std::vector<int>& subset);

}  // namespace cdense

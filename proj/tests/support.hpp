#pragma once

#include <string>
#include <vector>

#include "cdense/corpus.hpp"
#include "cdense/kernels.hpp"
#include "cdense/types.hpp"

namespace testing {

using namespace cdense;

inline Signature unary_p() {
  Signature sig;
  sig.relations.push_back({"P", 1, {}});
  return sig;
}

// {a, b} with d(a, b) = 1/2, P(a) = 0, P(b) = 3/4.
inline ContinuousStructure m2() {
  ContinuousStructure M;
  M.sig = unary_p();
  M.universe = {"a", "b"};
  M.metric = {Rational(0), Rational(1, 2), Rational(1, 2), Rational(0)};
  M.rel_tables = {{Rational(0), Rational(3, 4)}};
  return M;
}

inline ContinuousStructure one_point() {
  ContinuousStructure M;
  M.sig = unary_p();
  M.universe = {"a"};
  M.metric = {Rational(0)};
  M.rel_tables = {{Rational(1, 2)}};
  return M;
}

// Metric from an upper triangle listed row by row.
inline std::vector<Rational> metric_from(std::size_t n, const std::vector<Rational>& upper) {
  std::vector<Rational> m(n * n, Rational(0));
  std::size_t k = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) m[a * n + b] = m[b * n + a] = upper[k++];
  return m;
}

inline DiscreteSignatureFragment fragment_of(const Signature& sig, const std::vector<std::string>& texts, int L,
                                             int omega = 4) {
  std::vector<Formula> seed;
  for (const auto& t : texts) seed.push_back(parse_formula(t, sig));
  return build_signature_fragment(sig, fragment_close(seed, sig, L, omega));
}

inline Formula fml(const std::string& text, const Signature& sig) { return parse_formula(text, sig); }

inline int formula_id(const DiscreteStructure& D, const std::string& text) {
  return D.index().find(parse_formula(text, D.sigf.sig()));
}

inline std::size_t tup(const DiscreteStructure& D, std::vector<int> xs) { return encode_tuple(xs, D.size()); }

}  // namespace testing

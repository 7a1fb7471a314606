#include "doctest.h"

#include <algorithm>

#include "support.hpp"

using namespace testing;

namespace {

std::uint64_t scheme_count(const InstanceSet& set, Scheme s) { return set.counts()[static_cast<std::size_t>(s)]; }

std::vector<std::string> rendered(const InstanceSet& set, Scheme s, const DiscreteSignatureFragment& sigf,
                                  const Carrier& c) {
  std::vector<std::string> out;
  for (const auto& it : set.items)
    if (it.scheme == s) out.push_back(render_instance(set, it.root, *sigf.index, c));
  return out;
}

Carrier carrier_of(std::size_t n) {
  Carrier c;
  for (std::size_t i = 0; i < n; ++i) c.universe.push_back("a" + std::to_string(i));
  return c;
}

}  // namespace

TEST_CASE("signature fragment sizes") {
  const Signature sig = unary_p();
  CHECK(fragment_of(sig, {"d(x, y)"}, 2).symbol_count() == 6);
  CHECK(fragment_of(sig, {"d(x, y)", "P(x)"}, 4).symbol_count() == 20);
  const auto symbols = fragment_of(sig, {"d(x, y)"}, 2).symbols();
  REQUIRE(symbols.size() == 6);
  CHECK(symbols[0].grid == 0);
  CHECK(symbols[0].dir == Dir::GEQ);
  CHECK(symbols[1].dir == Dir::LEQ);
  CHECK_THROWS_AS(fragment_of(sig, {"P(x)"}, 4), InputError);
  CHECK_THROWS_AS(fragment_of(sig, {"d(x, y)"}, 1), InputError);
}

TEST_CASE("nicely dense subsets") {
  const ContinuousStructure M = m2();
  CHECK(check_nicely_dense(M, {0, 1}));
  CHECK_FALSE(check_nicely_dense(M, {0}));
  ContinuousStructure C = M;
  C.sig.functions.push_back({"c", 0, {}});
  C.func_tables = {{1}};
  CHECK_FALSE(check_nicely_dense(C, {0}));
  const auto sigf = fragment_of(M.sig, {"d(x, y)"}, 2);
  CHECK_THROWS_AS(encode(M, {0}, sigf), NotNicelyDense);
}

TEST_CASE("encoding thresholds") {
  const ContinuousStructure M = m2();
  const DiscreteStructure D = encode(M, fragment_of(M.sig, {"d(x, y)", "P(x)"}, 4));
  const ThresholdView view(D);
  const int P = formula_id(D, "P(x)");
  const int d = formula_id(D, "d(x, y)");
  // R_{P >= 1/2} = {b}
  CHECK_FALSE(view.bit(P, 0, Dir::GEQ, 2));
  CHECK(view.bit(P, 1, Dir::GEQ, 2));
  for (std::size_t t = 0; t < 2; ++t) CHECK(view.bit(P, t, Dir::GEQ, 0));
  for (std::size_t t = 0; t < 4; ++t) CHECK(view.bit(d, t, Dir::GEQ, 0));
  CHECK(view.bit(d, tup(D, {0, 0}), Dir::LEQ, 0));
  CHECK_FALSE(view.bit(d, tup(D, {0, 1}), Dir::LEQ, 0));
  CHECK(view.query(P, 1, Dir::LEQ, Rational(3, 4)) == Tri::True);
  CHECK(view.query(P, 1, Dir::GEQ, Rational(7, 8)) == Tri::False);
}

TEST_CASE("materialize") {
  const ContinuousStructure M = m2();
  const DiscreteStructure D = encode(M, fragment_of(M.sig, {"d(x, y)", "P(x)"}, 4));
  const DiscreteStructure X = materialize(D);
  REQUIRE_FALSE(X.intensional());
  std::size_t bits = 0;
  for (const auto& b : X.truth->bits) bits += b.size();
  // d over 4 pairs and P over 2 elements, 5 thresholds and 2 directions each.
  CHECK(bits == (4 + 2) * 5 * 2);
  const ThresholdView a(D), b(X);
  for (std::size_t f = 0; f < D.index().size(); ++f)
    for (std::size_t t = 0; t < tuple_count(2, D.index().at(static_cast<int>(f)).arity); ++t)
      for (int i = 0; i <= 4; ++i)
        for (Dir dir : {Dir::GEQ, Dir::LEQ})
          CHECK(a.bit(static_cast<int>(f), t, dir, i) == b.bit(static_cast<int>(f), t, dir, i));
  const DiscreteStructure Y = materialize(X);
  CHECK(*Y.truth == *X.truth);

  ContinuousStructure E;
  const DiscreteStructure Z = materialize(encode(E, fragment_of(E.sig, {"d(x, y)"}, 2)));
  for (const auto& t : Z.truth->bits) CHECK(t.empty());
}

TEST_CASE("instance counts") {
  const Signature sig = unary_p();
  const Carrier c = carrier_of(2);
  const auto with_p = fragment_of(sig, {"d(x, y)", "P(x)"}, 2);
  const auto only_d = fragment_of(sig, {"d(x, y)"}, 2);
  // 1(e) for P alone: 3 thresholds x 2 elements.
  CHECK(scheme_count(generate_tdense(with_p, c, 4), Scheme::S1e) -
            scheme_count(generate_tdense(only_d, c, 4), Scheme::S1e) ==
        6);
  // 1(c) needs r > s: the grid {0, 1/2, 1} has 3 such pairs, times 4 tuples.
  CHECK(scheme_count(generate_tdense(only_d, c, 4), Scheme::S1c) == 3 * 4);
  const InstanceSet a = generate_tdense(with_p, c, 4);
  const InstanceSet b = generate_tdense(with_p, c, 4);
  CHECK(a.counts() == b.counts());
  CHECK(a.items.size() == b.items.size());
  CHECK_THROWS_AS(generate_tdense(with_p, c, 1), InputError);
}

TEST_CASE("golden instance count for d alone") {
  // Frozen from the generator; guards against silent changes in enumeration.
  const Signature sig;
  const InstanceSet set = generate_tdense(fragment_of(sig, {"d(x, y)"}, 2, 8), carrier_of(2), 8);
  CHECK(set.items.size() == 188);
  CHECK(scheme_count(set, Scheme::S3b) == 24);
  CHECK(scheme_count(set, Scheme::S3a) == 4);
  CHECK(set.skipped[static_cast<std::size_t>(Scheme::S2b)] == 2);
}

TEST_CASE("scheme 2(b) shape") {
  const Signature sig;
  const auto sigf = fragment_of(sig, {"d(x, y)", "0", "1"}, 2);
  const Carrier c = carrier_of(1);
  const auto lines = rendered(generate_tdense(sigf, c, 4), Scheme::S2b, sigf, c);
  CHECK(std::find(lines.begin(), lines.end(), "(!R[0 >= 1/2]() & !R[1 <= 1/2]())") != lines.end());
}

TEST_CASE("encodings pass and mutations fail") {
  const ContinuousStructure M = m2();
  const auto sigf = fragment_of(M.sig, {"d(x, y)", "P(x)"}, 4);
  const DiscreteStructure X = materialize(encode(M, sigf));
  const InstanceSet set = generate_tdense(sigf, X.carrier, 4);
  CHECK(check_tdense(X, set).ok());
  CHECK(check_tdense(encode(M, sigf), set).ok());

  auto truth = std::make_shared<TruthTables>(*X.truth);
  const int d = X.index().dist_atom();
  truth->set(d, tup(X, {0, 1}), Dir::LEQ, 0, true);
  DiscreteStructure Y = X;
  Y.truth = truth;
  const VerdictReport r = check_tdense(Y, set);
  CHECK_FALSE(r.ok());
  const SchemeVerdict& v = r.of(Scheme::S3a);
  CHECK(v.fail >= 1);
  REQUIRE(v.witness);
  CHECK(v.witness->find("(a,b)") != std::string::npos);

  InstanceSet empty;
  empty.grid_L = 4;
  CHECK(check_tdense(X, empty).ok());
}

TEST_CASE("limit schemes are oracle-exact on intensional input") {
  const ContinuousStructure M = m2();
  const auto sigf = fragment_of(M.sig, {"d(x, y)", "sup x. P(x)"}, 4);
  const DiscreteStructure D = encode(M, sigf);
  const InstanceSet set = generate_tdense(sigf, D.carrier, 4);
  const VerdictReport a = check_tdense(D, set);
  const VerdictReport b = check_tdense(materialize(D), set);
  for (Scheme s : {Scheme::S1f, Scheme::S1g, Scheme::S1h, Scheme::S2h, Scheme::S2i}) {
    CHECK(a.of(s).mode == "oracle-exact");
    CHECK(b.of(s).mode != "oracle-exact");
  }
  CHECK(a.ok());
  CHECK(b.ok());
}

TEST_CASE("conditions as extra axioms") {
  const ContinuousStructure M = m2();
  const auto sigf = fragment_of(M.sig, {"d(x, y)", "monus(1, 1)", "1"}, 4);
  const DiscreteStructure X = materialize(encode(M, sigf));
  const InstanceSet base = generate_tdense(sigf, X.carrier, 4);
  CHECK(generate_tstar({}, sigf, X.carrier, 4).items.size() == base.items.size());

  const InstanceSet ok = generate_tstar({{fml("monus(1, 1)", M.sig)}}, sigf, X.carrier, 4);
  CHECK(ok.items.size() == base.items.size() + 1);
  CHECK(check_tdense(X, ok).ok());

  const InstanceSet bad = generate_tstar({{fml("1", M.sig)}}, sigf, X.carrier, 4);
  const VerdictReport r = check_tdense(X, bad);
  CHECK(r.of(Scheme::TStar).fail == 1);
  CHECK_THROWS_AS(generate_tstar({{fml("sup x. P(x)", M.sig)}}, sigf, X.carrier, 4), InputError);
}

TEST_CASE("off-grid detection") {
  const ContinuousStructure M = m2();
  CHECK(off_grid_values(encode(M, fragment_of(M.sig, {"d(x, y)", "P(x)"}, 4))).empty());
  CHECK_FALSE(off_grid_values(encode(M, fragment_of(M.sig, {"d(x, y)", "P(x)"}, 2))).empty());
}

TEST_CASE("parallel kernels agree with serial references") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    SigShape shape;
    shape.binary_rel = static_cast<int>(seed % 2);
    shape.unary_fun = static_cast<int>((seed / 2) % 2);
    const ContinuousStructure M = gen_random_structure(seed, 2 + static_cast<int>(seed % 3), 6, shape);
    const auto sigf = build_signature_fragment(M.sig, depth_closure(M.sig, 1, 6, 4));
    const ValueTables v = kernels::value_tables(M, *sigf.index);
    CHECK(v == kernels::value_tables_serial(M, *sigf.index));
    CHECK(kernels::materialize_tables(v, *sigf.index) == kernels::materialize_tables_serial(v, *sigf.index));
    const DiscreteStructure X = materialize(encode(M, sigf));
    const InstanceSet set = generate_tdense(sigf, X.carrier, 4);
    CHECK(kernels::evaluate(X, set) == kernels::evaluate_serial(X, set));
  }
}

#include "doctest.h"

#include "support.hpp"

using namespace testing;

TEST_CASE("evaluation on the two-point structure") {
  const ContinuousStructure M = m2();
  CHECK(eval(M, fml("monus(1, 1)", M.sig), {}) == Rational(0));
  CHECK(eval(M, fml("sup x. P(x)", M.sig), {}) == Rational(3, 4));
  CHECK(eval(M, fml("inf x. P(x)", M.sig), {}) == Rational(0));
  CHECK(eval(M, fml("half(P(x))", M.sig), {{"x", 1}}) == Rational(3, 8));
  CHECK(eval(M, fml("d(x, y)", M.sig), {{"x", 0}, {"y", 1}}) == Rational(1, 2));
  CHECK_THROWS_AS(eval(M, fml("P(x)", M.sig), {}), UnboundVariable);
}

TEST_CASE("metric checks") {
  ContinuousStructure M;
  M.universe = {"a"};
  M.metric = {Rational(0)};
  CHECK(check_metric(M).empty());

  M.universe = {"a", "b"};
  M.metric = metric_from(2, {Rational(0)});
  auto v = check_metric(M);
  REQUIRE(v.size() == 2);
  CHECK(v[0].kind == "identity");

  M.universe = {"a", "b", "c"};
  M.metric = metric_from(3, {Rational(1, 4), Rational(1), Rational(1, 4)});
  v = check_metric(M);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].kind == "triangle");
  CHECK(v[0].elements == std::vector<std::string>{"a", "b", "c"});

  M.metric[1] = Rational(1, 3);
  bool symmetry = false;
  for (const auto& x : check_metric(M)) symmetry |= x.kind == "symmetry";
  CHECK(symmetry);
}

TEST_CASE("uniform continuity checks") {
  ContinuousStructure M;
  M.sig.relations.push_back({"P", 1, {}});
  M.sig.relations[0].modulus.set(Rational(0), Rational(1));
  M.universe = {"a", "b"};
  M.metric = metric_from(2, {Rational(1, 4)});
  M.rel_tables = {{Rational(1, 3), Rational(1, 3)}};
  CHECK(check_uniform_continuity(M).empty());

  M.sig.relations[0].modulus = {};
  M.sig.relations[0].modulus.set(Rational(1, 2), Rational(1, 2));
  M.rel_tables = {{Rational(0), Rational(1)}};
  const auto v = check_uniform_continuity(M);
  REQUIRE(v.size() >= 1);
  CHECK(v[0].kind == "continuity");
  CHECK(v[0].symbol == "P");

  ContinuousStructure I;
  I.sig.functions.push_back({"F", 1, {}});
  for (int i = 0; i <= 4; ++i) I.sig.functions[0].modulus.set(Rational(i, 4), Rational(i, 4));
  I.universe = {"a", "b", "c"};
  I.metric = metric_from(3, {Rational(1, 4), Rational(1, 2), Rational(1, 4)});
  I.func_tables = {{0, 1, 2}};
  CHECK(check_uniform_continuity(I).empty());
}

TEST_CASE("table checks") {
  ContinuousStructure M = m2();
  M.rel_tables[0][1] = Rational(5, 4);
  const auto v = check_tables(M);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == "range");
  CHECK_THROWS_AS(validate_structure(M), ValidationError);
  CHECK_NOTHROW(validate_structure(m2()));
}

TEST_CASE("theories") {
  const ContinuousStructure M = m2();
  CHECK(models_theory(M, {{fml("monus(1, 1)", M.sig)}}).pass);
  const TheoryReport r = models_theory(M, {{fml("sup x. P(x)", M.sig)}});
  CHECK_FALSE(r.pass);
  REQUIRE(r.results.size() == 1);
  CHECK(r.results[0].value == Rational(3, 4));
  CHECK(models_theory(M, {}).pass);
}

TEST_CASE("fragment elementarity") {
  const ContinuousStructure N = m2();
  const ContinuousStructure M = restrict_structure(N, {0});
  CHECK(M.universe == std::vector<std::string>{"a"});
  CHECK(check_phi_elementary(N, N, {fml("sup x. P(x)", N.sig)}).elementary);
  CHECK(check_phi_elementary(M, N, {fml("P(x)", N.sig)}).elementary);
  const ElementarityResult r = check_phi_elementary(M, N, {fml("sup x. P(x)", N.sig)});
  CHECK_FALSE(r.elementary);
  REQUIRE(r.witness);
  CHECK(r.witness->value_in_M == Rational(0));
  CHECK(r.witness->value_in_N == Rational(3, 4));

  ContinuousStructure bad = M;
  bad.rel_tables[0][0] = Rational(1, 4);
  CHECK_THROWS_AS(check_phi_elementary(bad, N, {}), NotSubstructure);
}

TEST_CASE("measured moduli are optimal on the grid") {
  const ContinuousStructure M = m2();
  const ModulusTable m = measured_modulus(M, false, 0, 4);
  // The only nonzero distance is 1/2 with a jump of 3/4.
  CHECK(m.delta_at(Rational(0)) == Rational(1, 2));
  CHECK(m.delta_at(Rational(1, 2)) == Rational(1, 2));
  CHECK(m.delta_at(Rational(3, 4)) == Rational(1));
  ContinuousStructure W = M;
  W.sig.relations[0].modulus = m;
  CHECK(check_uniform_continuity(W).empty());
}

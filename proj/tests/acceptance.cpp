// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and corpus
// sizes are fixed below; all comparisons are exact rationals.
#include <chrono>
#include <cstdio>
#include <array>
#include <numeric>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cdense/io.hpp"
#include "cdense/kernels.hpp"

using namespace cdense;

namespace {

// Criterion 1
constexpr int kRoundtripSeeds = 200;
constexpr int kRoundtripGrid = 24;
constexpr int kRoundtripMaxSize = 6;
constexpr double kRoundtripBudgetSeconds = 30.0;
// Criteria 2 and 4
constexpr int kSoundSeeds = 20;
constexpr int kSoundGrid = 8;
constexpr int kSoundOmega = 16;
constexpr double kSoundBudgetSeconds = 60.0;
// Criterion 3
constexpr int kMutationSeeds = 10;
constexpr double kMutationCatchRate = 0.99;
// Criteria 5 and 7: structure grid 6, fragment grid 24 so depth-2 values stay on the grid.
constexpr int kElemPairs = 50;
constexpr int kTypeSeeds = 20;
constexpr int kValueGrid = 6;
constexpr int kFragmentGrid = 24;
// Criterion 8
constexpr int kDyadicK = 6;
constexpr int kSequenceDepth = 8;
constexpr int kSequenceSeeds = 10;
// Criterion 9
constexpr int kPraVectors = 10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SigShape shape_for(std::uint64_t seed) {
  SigShape s;
  s.unary_rel = 1;
  s.binary_rel = static_cast<int>(seed % 2);
  s.unary_fun = static_cast<int>((seed / 2) % 2);
  return s;
}

DiscreteSignatureFragment depth2(const Signature& sig, int L, int omega) {
  return build_signature_fragment(sig, depth_closure(sig, 2, L, omega));
}

int results_failed = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  if (!pass) ++results_failed;
  std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << what << "  [" << detail << "]"
            << std::endl;
}

// ------------------------------------------------------------------ 1

void criterion1() {
  const auto t0 = Clock::now();
  int ok = 0;
  std::string first;
  for (int seed = 0; seed < kRoundtripSeeds; ++seed) {
    const int n = 1 + seed % kRoundtripMaxSize;
    const ContinuousStructure M = gen_random_structure(seed, n, kRoundtripGrid, shape_for(seed));
    const RoundtripReport r = roundtrip_check(M, depth2(M.sig, kRoundtripGrid, 2));
    if (r.pass()) {
      ++ok;
    } else if (first.empty()) {
      first = "seed " + std::to_string(seed) + ": " + r.clause + " " + r.detail;
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << ok << "/" << kRoundtripSeeds << " structures exact, " << secs << " s (budget " << kRoundtripBudgetSeconds
    << " s)";
  if (!first.empty()) d << "; first failure " << first;
  report(1, ok == kRoundtripSeeds && secs < kRoundtripBudgetSeconds,
         "round trip decode(encode(M)) = M and encode(decode(D)) = D", d.str());
}

// ------------------------------------------------------------------ 2 and 4

struct Encoded {
  ContinuousStructure M;
  DiscreteSignatureFragment sigf;
  DiscreteStructure D;  // intensional
  DiscreteStructure X;  // extensional
};

Encoded encode_seed(std::uint64_t seed, int n, int value_grid, int fragment_grid, int omega) {
  Encoded e;
  e.M = gen_random_structure(seed, n, value_grid, shape_for(seed));
  e.sigf = depth2(e.M.sig, fragment_grid, omega);
  e.D = encode(e.M, e.sigf);
  e.X = materialize(e.D);
  return e;
}

std::vector<Encoded> sound_corpus() {
  std::vector<Encoded> out;
  for (int seed = 0; seed < kSoundSeeds; ++seed)
    out.push_back(encode_seed(1000 + seed, 2 + seed % 4, kSoundGrid, kSoundGrid, kSoundOmega));
  return out;
}

void criterion2(const std::vector<Encoded>& corpus) {
  const auto t0 = Clock::now();
  std::uint64_t instances = 0, failures = 0;
  std::array<std::uint64_t, kSchemeCount> exercised{};
  bool modes_ok = true;
  std::string first;
  for (const auto& e : corpus) {
    const InstanceSet set = generate_tdense(e.sigf, e.D.carrier, kSoundOmega);
    instances += set.items.size();
    for (const DiscreteStructure* D : {&e.D, &e.X}) {
      const VerdictReport rep = check_tdense(*D, set);
      failures += rep.failures();
      for (const auto& v : rep.schemes) {
        exercised[static_cast<std::size_t>(v.scheme)] += v.pass + v.fail;
        if (v.fail && first.empty()) first = std::string(scheme_name(v.scheme)) + ": " + v.witness.value_or("");
        if (D == &e.D && oracle_scheme(v.scheme) && v.pass + v.fail > 0 && v.mode != "oracle-exact")
          modes_ok = false;
      }
    }
  }
  int schemes = 0;
  for (std::size_t s = 0; s < kSchemeCount; ++s)
    if (exercised[s] > 0 && static_cast<Scheme>(s) != Scheme::TStar) ++schemes;
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << corpus.size() << " encodings, " << instances << " instances each checked intensionally and extensionally, "
    << failures << " failures, " << schemes << " scheme ids exercised, limit schemes oracle-exact: "
    << (modes_ok ? "yes" : "no") << ", " << secs << " s (budget " << kSoundBudgetSeconds << " s)";
  if (!first.empty()) d << "; first failure " << first;
  report(2, failures == 0 && modes_ok && schemes == static_cast<int>(kSchemeCount) - 1 && secs < kSoundBudgetSeconds,
         "every encoding satisfies all generated T_dense instances", d.str());
}

void criterion4(const std::vector<Encoded>& corpus) {
  std::uint64_t checked = 0, mismatches = 0, metric_violations = 0;
  for (const auto& e : corpus) {
    const auto& fi = e.D.index();
    for (std::size_t f = 0; f < fi.size(); ++f) {
      const std::size_t T = tuple_count(e.D.size(), fi.at(static_cast<int>(f)).arity);
      for (std::size_t t = 0; t < T; ++t) {
        const SupInfResult r = sup_inf_exact(e.D, static_cast<int>(f), t);
        ++checked;
        if (!r.equal || r.sup_geq != r.inf_leq || r.sup_geq != e.D.oracle->value(static_cast<int>(f), t)) ++mismatches;
      }
    }
    const DerivedMetric dm = derived_metric(e.X);
    ContinuousStructure bare;
    bare.universe = e.M.universe;
    bare.metric = dm.values;
    metric_violations += check_metric(bare).size();
    if (!dm.exact()) ++mismatches;
  }
  std::ostringstream d;
  d << checked << " formula/tuple pairs, " << mismatches << " sup/inf mismatches, " << metric_violations
    << " derived-metric violations";
  report(4, mismatches == 0 && metric_violations == 0, "sup of the >=-set equals inf of the <=-set; derived D is a metric",
         d.str());
}

// ------------------------------------------------------------------ 3

void criterion3() {
  std::uint64_t total = 0, caught = 0, d_total = 0, d_caught = 0;
  std::vector<std::string> uncaught;
  for (int seed = 0; seed < kMutationSeeds; ++seed) {
    const Encoded e = encode_seed(2000 + seed, 2 + seed % 3, kSoundGrid, kSoundGrid, kSoundOmega);
    const InstanceSet set = generate_tdense(e.sigf, e.X.carrier, kSoundOmega);
    auto truth = std::make_shared<TruthTables>(*e.X.truth);
    DiscreteStructure X = e.X;
    X.truth = truth;

    // Inverse index: bit -> instances reading it.
    std::vector<std::size_t> base(truth->bits.size() + 1, 0);
    for (std::size_t f = 0; f < truth->bits.size(); ++f) base[f + 1] = base[f] + truth->bits[f].size();
    std::vector<std::vector<std::uint32_t>> readers(base.back());
    for (std::size_t k = 0; k < set.items.size(); ++k)
      for (const auto& [f, off] : kernels::instance_bits(set, set.items[k].root))
        readers[base[f] + off].push_back(static_cast<std::uint32_t>(k));

    const auto& fi = X.index();
    const int dist = fi.dist_atom();
    const int L = X.grid_L();
    for (std::size_t f = 0; f < truth->bits.size(); ++f)
      for (std::size_t off = 0; off < truth->bits[f].size(); ++off) {
        auto& bit = truth->bits[f][off];
        bit ^= 1;
        bool hit = false;
        for (std::uint32_t k : readers[base[f] + off])
          if (kernels::evaluate_root(X, set, set.items[k].root) == Tri::False) {
            hit = true;
            break;
          }
        bit ^= 1;
        ++total;
        caught += hit;
        if (static_cast<int>(f) == dist) {
          ++d_total;
          d_caught += hit;
        }
        if (!hit && uncaught.size() < 3) {
          const std::size_t per_tuple = 2 * static_cast<std::size_t>(L + 1);
          const std::size_t t = off / per_tuple, rem = off % per_tuple;
          std::ostringstream u;
          u << "seed " << 2000 + seed << " R[" << fi.at(static_cast<int>(f)).key << (rem / (L + 1) ? " <= " : " >= ")
            << Rational(static_cast<long>(rem % (L + 1)), L).str() << "](t" << t << ")";
          uncaught.push_back(u.str());
        }
      }
  }
  const double rate = total ? static_cast<double>(caught) / static_cast<double>(total) : 1.0;
  std::ostringstream d;
  d << "d-relation flips caught " << d_caught << "/" << d_total << "; all flips caught " << caught << "/" << total
    << " (" << rate * 100 << "%, required " << kMutationCatchRate * 100 << "%)";
  if (!uncaught.empty()) {
    d << "; the " << total - caught << " uncaught flips leave every instance reading them non-false, e.g.";
    for (const auto& u : uncaught) d << " " << u;
  }
  report(3, d_caught == d_total && rate >= kMutationCatchRate, "single-bit mutations are detected", d.str());
}

// ------------------------------------------------------------------ 5

void criterion5() {
  int agree = 0, elementary = 0;
  std::string first;
  for (int k = 0; k < kElemPairs; ++k) {
    const std::uint64_t seed = 3000 + k;
    const int n = 3 + k % 3;
    const ContinuousStructure N = gen_random_structure(seed, n, kValueGrid, shape_for(seed));
    std::vector<int> sub;
    if (k % 5 == 0) {
      for (int i = 0; i < n; ++i) sub.push_back(i);
    } else {
      for (int i = 0; i < n; ++i)
        if ((seed >> (i % 8)) & 1 || i == 0) sub.push_back(i);
      sub = function_closure(N, sub);
    }
    const ContinuousStructure M = restrict_structure(N, sub);
    const Fragment frag = depth_closure(N.sig, 2, kFragmentGrid, 2);
    const bool cont = check_phi_elementary(M, N, frag.formulas).elementary;
    const auto sigf = build_signature_fragment(N.sig, frag);
    const bool disc = !substructure_mismatch(materialize(encode(M, sigf)), materialize(encode(N, sigf))).has_value();
    elementary += cont;
    if (cont == disc) {
      ++agree;
    } else if (first.empty()) {
      first = "seed " + std::to_string(seed);
    }
  }
  std::ostringstream d;
  d << agree << "/" << kElemPairs << " pairs agree (" << elementary << " elementary, " << kElemPairs - elementary
    << " not)";
  if (!first.empty()) d << "; first disagreement " << first;
  report(5, agree == kElemPairs, "fragment elementarity iff tau+-substructure of encodings", d.str());
}

// ------------------------------------------------------------------ 6

void criterion6() {
  std::uint64_t points = 0, below = 0;
  std::string first;
  for (int seed = 0; seed < kRoundtripSeeds; ++seed) {
    const int n = 1 + seed % kRoundtripMaxSize;
    const ContinuousStructure M = gen_random_structure(seed, n, kRoundtripGrid, shape_for(seed));
    const DiscreteStructure X = materialize(encode(M, depth2(M.sig, kRoundtripGrid, 2)));
    const DerivedModuli dm = derived_moduli(X);
    auto compare = [&](const ModulusTable& derived, const ModulusTable& declared, const std::string& name) {
      for (int i = 0; i <= kRoundtripGrid; ++i) {
        const Rational r(i, kRoundtripGrid);
        ++points;
        if (derived.delta_at(r) < declared.delta_at(r)) {
          ++below;
          if (first.empty()) first = "seed " + std::to_string(seed) + " " + name + " at r=" + r.str();
        }
      }
    };
    for (std::size_t f = 0; f < M.sig.functions.size(); ++f)
      compare(dm.functions[f], M.sig.functions[f].modulus, M.sig.functions[f].name);
    for (std::size_t r = 0; r < M.sig.relations.size(); ++r)
      compare(dm.relations[r], M.sig.relations[r].modulus, M.sig.relations[r].name);
  }
  std::ostringstream d;
  d << points << " grid points over " << kRoundtripSeeds << " encodings, " << below << " below declared";
  if (!first.empty()) d << "; first " << first;
  report(6, below == 0, "derived moduli dominate declared moduli pointwise", d.str());
}

// ------------------------------------------------------------------ 7

void criterion7() {
  std::uint64_t pairs = 0, disagreements = 0, realized = 0;
  for (int seed = 0; seed < kTypeSeeds; ++seed) {
    const Encoded e = encode_seed(4000 + seed, 2 + seed % 3, kValueGrid, kFragmentGrid, 2);
    const std::size_t n = e.M.size();
    const auto& fi = e.X.index();
    // Continuous oracle: equal values of every fragment formula on every
    // pattern mixing the subject with the parameters.
    auto same_values = [&](const std::vector<int>& a, const std::vector<int>& b, const std::vector<int>& ps) {
      std::vector<int> ea = a, eb = b;
      ea.insert(ea.end(), ps.begin(), ps.end());
      eb.insert(eb.end(), ps.begin(), ps.end());
      const int width = static_cast<int>(ea.size());
      for (std::size_t f = 0; f < fi.size(); ++f) {
        const auto& info = fi.at(static_cast<int>(f));
        const std::size_t P = tuple_count(static_cast<std::size_t>(width), info.arity);
        for (std::size_t p = 0; p < P; ++p) {
          const auto pattern = decode_tuple(p, info.arity, static_cast<std::size_t>(width));
          bool has_subject = false;
          Assignment va, vb;
          for (int k = 0; k < info.arity; ++k) {
            has_subject |= pattern[k] < static_cast<int>(a.size());
            va[info.vars[k]] = ea[pattern[k]];
            vb[info.vars[k]] = eb[pattern[k]];
          }
          if (!has_subject) continue;
          if (eval(e.M, info.formula, va) != eval(e.M, info.formula, vb)) return false;
        }
      }
      return true;
    };
    const std::vector<std::vector<int>> param_sets = {{}, {0}};
    for (const auto& ps : param_sets)
      for (int arity = 1; arity <= 2; ++arity) {
        const std::size_t T = tuple_count(n, arity);
        for (std::size_t x = 0; x < T; ++x)
          for (std::size_t y = x; y < T; ++y) {
            const auto a = decode_tuple(x, arity, n), b = decode_tuple(y, arity, n);
            ++pairs;
            if (same_type(e.X, a, b, ps) != same_values(a, b, ps)) ++disagreements;
          }
      }
    Rational min_d(1);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != b) min_d = rmin(min_d, e.M.d(static_cast<int>(a), static_cast<int>(b)));
    const int N0 = static_cast<int>((Rational(1) / min_d).floor_mul(1)) + 1;
    realized += infinitesimal_witness(e.X, N0).has_value();
  }
  std::ostringstream d;
  d << pairs << " tuple pairs, " << disagreements << " disagreements; infinitesimal type realized in " << realized
    << "/" << kTypeSeeds << " encodings";
  report(7, disagreements == 0 && realized == 0, "same qf type iff equal fragment values; no infinitesimals", d.str());
}

// ------------------------------------------------------------------ 8

struct SeqTally {
  int cases = 0, agree = 0, realized = 0, limits = 0;
  std::string first;
};

void sequence_case(const ContinuousStructure& M, int grid, const ContinuousTypeFragment& r, SeqTally& tally,
                   const std::string& label) {
  std::vector<Formula> seed{parse_formula("d(x, y)", M.sig)};
  for (const auto& c : r.conditions) seed.push_back(c.formula);
  const auto sigf = build_signature_fragment(M.sig, fragment_close(seed, M.sig, grid, 2));
  const DiscreteStructure X = materialize(encode(M, sigf));
  std::vector<int> all(M.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  const SequenceType st = build_sequence_type(r, M, all, kSequenceDepth);
  const bool cont = realized_in(M, r).has_value();
  const auto chain = find_sequence_realization(X, st);
  bool limit_ok = false;
  try {
    limit_ok = limit_type(st, X) == r;
  } catch (const UnresolvedChain&) {
  }
  bool chain_ok = !chain || check_realizes_sequence(X, *chain, st).ok;
  ++tally.cases;
  tally.realized += cont;
  tally.limits += limit_ok;
  if (cont == chain.has_value() && chain_ok) {
    ++tally.agree;
  } else if (tally.first.empty()) {
    tally.first = label;
  }
}

void criterion8() {
  SeqTally tally;
  // Dyadic top level: 2^K + 1 points, P from each relation shape.
  for (DyadicRelation rel : {DyadicRelation::Id, DyadicRelation::Tent}) {
    const ContinuousStructure M = dyadic_level(kDyadicK, kDyadicK, rel);
    const int grid = 1 << kDyadicK;
    const std::vector<std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>>> specs = {
        {{"d(x, y)"}, {{"1/3"}}},
        {{"d(x, y)"}, {{"3/4"}}},
        {{"d(x, y)", "d(x, z)"}, {{"1/4"}, {"1/2"}}},
        {{"d(x, y)", "d(x, z)"}, {{"1/2"}, {"1/2"}}},
        {{"monus(P(x), half(1))", "monus(half(half(1)), d(x, y))"}, {{}, {"1/2"}}},
        {{"monus(half(1), P(x))", "monus(d(x, y), half(half(1)))"}, {{}, {"0"}}},
        {{"monus(half(1), P(x))", "monus(d(x, y), half(half(1)))"}, {{}, {"1"}}},
        {{"monus(P(x), half(half(1)))", "monus(half(1), P(x))"}, {{}, {}}},
    };
    for (std::size_t s = 0; s < specs.size(); ++s) {
      ContinuousTypeFragment r;
      r.vars = {"x"};
      for (std::size_t c = 0; c < specs[s].first.size(); ++c) {
        TypeCondition tc;
        tc.formula = parse_formula(specs[s].first[c], M.sig);
        for (const auto& v : free_vars(tc.formula))
          if (v != "x") tc.params.push_back(v);
        for (const auto& val : specs[s].second[c]) {
          // Dyadic element names are rationals; 1/3 is snapped to the nearest grid point.
          const Rational q = Rational::parse(val);
          tc.values.push_back(Rational(q.floor_mul(grid), grid).str());
        }
        r.conditions.push_back(tc);
      }
      sequence_case(M, grid, r, tally, "dyadic spec " + std::to_string(s));
    }
  }
  // Finite corpus structures with random parameters.
  const char* templates[] = {"d(x, y)", "monus(P0(x), half(1))", "monus(half(1), P0(x))", "monus(d(x, y), half(1))",
                             "monus(half(1), d(x, y))"};
  for (int seed = 0; seed < kSequenceSeeds; ++seed) {
    const ContinuousStructure M = gen_random_structure(5000 + seed, 3 + seed % 3, 8, SigShape{});
    std::uint64_t x = 0x9e3779b97f4a7c15ULL * (seed + 1);
    auto next = [&](std::uint64_t bound) {
      x ^= x << 13;
      x ^= x >> 7;
      x ^= x << 17;
      return x % bound;
    };
    for (int k = 0; k < 6; ++k) {
      ContinuousTypeFragment r;
      r.vars = {"x"};
      const int conds = 1 + static_cast<int>(next(3));
      for (int c = 0; c < conds; ++c) {
        TypeCondition tc;
        tc.formula = parse_formula(templates[next(5)], M.sig);
        for (const auto& v : free_vars(tc.formula))
          if (v != "x") {
            tc.params.push_back(v);
            tc.values.push_back(M.universe[next(M.size())]);
          }
        r.conditions.push_back(tc);
      }
      sequence_case(M, 8, r, tally, "seed " + std::to_string(5000 + seed) + " type " + std::to_string(k));
    }
  }
  std::ostringstream d;
  d << tally.agree << "/" << tally.cases << " types agree at depth " << kSequenceDepth << " (" << tally.realized
    << " realized), limit reproduces " << tally.limits << "/" << tally.cases;
  if (!tally.first.empty()) d << "; first disagreement " << tally.first;
  report(8, tally.agree == tally.cases && tally.limits == tally.cases,
         "continuous realization iff sequence-type realization; limit_type inverts build", d.str());
}

// ------------------------------------------------------------------ 9

void criterion9() {
  const std::vector<std::vector<Rational>> vectors = {
      {Rational(1)},
      {Rational(1, 2), Rational(1, 2)},
      {Rational(1, 3), Rational(2, 3)},
      {Rational(1, 4), Rational(3, 4)},
      {Rational(1, 3), Rational(1, 3), Rational(1, 3)},
      {Rational(1, 2), Rational(1, 4), Rational(1, 4)},
      {Rational(1, 6), Rational(1, 3), Rational(1, 2)},
      {Rational(0), Rational(1, 2), Rational(1, 2)},
      {Rational(1, 5), Rational(2, 5), Rational(2, 5)},
      {Rational(1, 8), Rational(3, 8), Rational(1, 2)},
  };
  static_assert(kPraVectors == 10);
  int ok = 0;
  std::string first;
  for (std::size_t v = 0; v < vectors.size(); ++v) {
    const auto& w = vectors[v];
    std::vector<std::string> problems;
    const ContinuousStructure P = gen_probability_algebra(w);
    try {
      validate_structure(P);
    } catch (const ValidationError& e) {
      problems.push_back(e.what());
    }
    const int zero = P.func_tables[P.sig.function_index("zero")][0];
    const int mu = P.sig.relation_index("mu");
    for (std::size_t x = 0; x < P.size(); ++x)
      if (P.rel_tables[mu][x] != P.d(static_cast<int>(x), zero)) problems.push_back("mu(x) != d(x, zero)");
    const auto conds = probability_algebra_conditions(P.sig);
    if (!models_theory(P, conds).pass) problems.push_back("condition bundle fails");

    // The same identities as relativized universal axioms on the encoding.
    std::vector<Formula> seed{parse_formula("d(x0, x1)", P.sig)};
    for (const auto& c : conds) seed.push_back(c.formula);
    long den = 1;
    for (const auto& r : P.metric) den = std::lcm(den, r.raw().get_den().get_si());
    const auto sigf = build_signature_fragment(P.sig, fragment_close(seed, P.sig, static_cast<int>(2 * den), 2));
    const DiscreteStructure X = materialize(encode(P, sigf));
    InstanceSet set;
    set.grid_L = X.grid_L();
    add_relativized(set, conds, sigf, X.carrier);
    if (!check_tdense(X, set).ok()) problems.push_back("relativized axioms fail on the encoding");

    bool uniform = true;
    for (const auto& x : w) uniform &= x == w[0];
    if (uniform) {
      const auto chain = extract_order_chain(P);
      if (chain.size() != w.size() + 1) problems.push_back("chain length " + std::to_string(chain.size()));
      for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        if (!pra_precedes(P, chain[i], chain[i + 1]) || pra_precedes(P, chain[i + 1], chain[i]))
          problems.push_back("chain not strictly increasing");
    }
    if (problems.empty()) {
      ++ok;
    } else if (first.empty()) {
      first = "vector " + std::to_string(v) + ": " + problems.front();
    }
  }
  std::ostringstream d;
  d << ok << "/" << vectors.size() << " weight vectors (k <= 3) clean";
  if (!first.empty()) d << "; first problem " << first;
  report(9, ok == static_cast<int>(vectors.size()), "probability algebras: validation, mu = d(., 0), identities, chains",
         d.str());
}

// ------------------------------------------------------------------ 10

// FNV-1a over everything a run emits, so two runs compare without holding the text.
struct Digest {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  std::uint64_t bytes = 0;
  void add(const std::string& s) {
    for (unsigned char c : s) hash = (hash ^ c) * 0x100000001b3ULL;
    bytes += s.size();
  }
  bool operator==(const Digest&) const = default;
};

Digest determinism_run() {
  Digest out;
  for (int seed = 0; seed < 5; ++seed) {
    const ContinuousStructure M = gen_random_structure(seed, 3, 8, shape_for(seed));
    out.add(io::structure_to_json(M).dump());
    const auto sigf = depth2(M.sig, 8, 4);
    const DiscreteStructure X = materialize(encode(M, sigf));
    out.add(io::discrete_to_json(X).dump());
    const InstanceSet set = generate_tdense(sigf, X.carrier, 4);
    for (const auto& it : set.items) {
      out.add(scheme_name(it.scheme));
      out.add(render_instance(set, it.root, *sigf.index, X.carrier));
    }
    for (const auto& v : check_tdense(X, set).schemes) out.add(io::verdict_to_json(v).dump());
  }
  out.add(io::structure_to_json(gen_probability_algebra({Rational(1, 2), Rational(1, 4), Rational(1, 4)})).dump());
  out.add(io::level_family_to_json(gen_dyadic_family(3, DyadicRelation::Tent)).dump());
  return out;
}

void criterion10() {
  const Digest a = determinism_run();
  const Digest b = determinism_run();
  std::ostringstream d;
  d << a.bytes << " bytes per run, digests " << std::hex << a.hash << " and " << b.hash;
  report(10, a == b, "generators, instance lists and reports are byte-identical across runs", d.str());
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion1();
  {
    const auto corpus = sound_corpus();
    criterion2(corpus);
    criterion3();
    criterion4(corpus);
  }
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::cout << "acceptance: " << (results_failed == 0 ? "all criteria pass" : std::to_string(results_failed) + " failing")
            << " in " << seconds_since(t0) << " s" << std::endl;
  return results_failed == 0 ? 0 : 1;
}

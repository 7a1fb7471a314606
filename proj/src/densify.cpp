#include "cdense/densify.hpp"

#include <algorithm>

namespace cdense {

namespace {

int relation_atom(const FragmentIndex& idx, const std::string& name, int arity) {
  for (std::size_t f = 0; f < idx.size(); ++f) {
    const FormulaInfo& fi = idx.at(static_cast<int>(f));
    if (fi.kind != FKind::Rel || fi.formula.name != name || fi.arity != arity) continue;
    bool plain = true;
    for (int k = 0; k < arity; ++k) plain = plain && fi.formula.terms[k].is_var() && fi.formula.terms[k].name == fi.vars[k];
    if (plain) return static_cast<int>(f);
  }
  return -1;
}

int require_relation_atom(const FragmentIndex& idx, const SymbolDecl& decl) {
  int f = relation_atom(idx, decl.name, decl.arity);
  if (f < 0) throw DecodeError("fragment lacks the atom for relation " + decl.name);
  return f;
}

// monus(R(a..), R(b..)) with 2m distinct variables: the 4(b) formula.
int continuity_formula(const FragmentIndex& idx, const SymbolDecl& decl) {
  for (std::size_t f = 0; f < idx.size(); ++f) {
    const FormulaInfo& fi = idx.at(static_cast<int>(f));
    if (fi.kind != FKind::Monus || fi.arity != 2 * decl.arity) continue;
    const Formula& a = fi.formula.kids[0];
    const Formula& b = fi.formula.kids[1];
    if (a.kind != FKind::Rel || b.kind != FKind::Rel || a.name != decl.name || b.name != decl.name) continue;
    bool ok = true;
    for (const auto& t : a.terms) ok = ok && t.is_var();
    for (const auto& t : b.terms) ok = ok && t.is_var();
    if (ok) return static_cast<int>(f);
  }
  return -1;
}

std::string tuple_names(const Carrier& c, const std::vector<int>& x) {
  std::string s = "(";
  for (std::size_t k = 0; k < x.size(); ++k) s += (k ? "," : "") + c.universe[x[k]];
  return s + ")";
}

}  // namespace

DerivedValue derived_value(const DiscreteStructure& D, int f, std::size_t t) {
  ThresholdView view(D);
  const int L = D.grid_L();
  const int s = view.geq_sup(f, t), i = view.leq_inf(f, t);
  const std::string where = D.index().at(f).key;
  if (s < 0) throw DecodeError("empty >=-set for " + where);
  if (i > L) throw DecodeError("empty <=-set for " + where);
  if (s > i) throw DecodeError("threshold sets cross for " + where);
  if (i - s > 1) throw DecodeError("gap wider than one grid step for " + where);
  return {Rational(i, L), Rational(i - s, L)};
}

bool DerivedMetric::exact() const {
  return std::all_of(gaps.begin(), gaps.end(), [](const Rational& g) { return g == Rational(0); });
}

DerivedMetric derived_metric(const DiscreteStructure& D) {
  const int dd = D.index().dist_atom();
  if (dd < 0) throw DecodeError("fragment lacks a distance atom");
  DerivedMetric m;
  m.n = D.size();
  for (std::size_t t = 0; t < m.n * m.n; ++t) {
    DerivedValue v = derived_value(D, dd, t);
    m.values.push_back(v.value);
    m.gaps.push_back(v.gap);
  }
  return m;
}

std::vector<std::vector<DerivedValue>> derived_relations(const DiscreteStructure& D) {
  const auto& sig = D.sigf.sig();
  std::vector<std::vector<DerivedValue>> out;
  for (const auto& decl : sig.relations) {
    const int f = require_relation_atom(D.index(), decl);
    std::vector<DerivedValue> col;
    const std::size_t T = tuple_count(D.size(), decl.arity);
    for (std::size_t t = 0; t < T; ++t) col.push_back(derived_value(D, f, t));
    out.push_back(std::move(col));
  }
  return out;
}

DerivedModuli derived_moduli(const DiscreteStructure& D) {
  const auto& sig = D.sigf.sig();
  const int L = D.grid_L();
  const std::size_t n = D.size();
  const int dd = D.index().dist_atom();
  ThresholdView view(D);
  // least[i]: least grid s at which some pair violates output tolerance i/L.
  auto table = [&](const std::vector<int>& least) {
    ModulusTable m;
    for (int i = 0; i <= L; ++i) m.entries.emplace_back(Rational(i, L), least[i] > L ? Rational(1) : Rational(least[i], L));
    return m;
  };
  auto pair_distance = [&](const std::vector<int>& x, const std::vector<int>& y) {
    int s = 0;
    for (std::size_t k = 0; k < x.size(); ++k) s = std::max(s, view.leq_inf(dd, x[k] * n + y[k]));
    return s;
  };
  DerivedModuli out;
  for (std::size_t fn = 0; fn < sig.functions.size(); ++fn) {
    const int m = sig.functions[fn].arity;
    const std::size_t T = tuple_count(n, m);
    std::vector<int> least(L + 1, L + 1);
    for (std::size_t a = 0; a < T; ++a)
      for (std::size_t c = 0; c < T; ++c) {
        auto x = decode_tuple(a, m, n), y = decode_tuple(c, m, n);
        const int s = pair_distance(x, y);
        const std::size_t out_pair = D.carrier.func_tables[fn][a] * n + D.carrier.func_tables[fn][c];
        for (int i = 0; i <= L; ++i)
          if (!view.bit(dd, out_pair, Dir::LEQ, i)) least[i] = std::min(least[i], s);
      }
    out.functions.push_back(table(least));
  }
  std::vector<std::vector<DerivedValue>> rel_values;
  for (std::size_t r = 0; r < sig.relations.size(); ++r) {
    const auto& decl = sig.relations[r];
    const int m = decl.arity;
    const std::size_t T = tuple_count(n, m);
    const int mu = continuity_formula(D.index(), decl);
    std::vector<DerivedValue> vals;
    if (mu < 0) {
      const int f = require_relation_atom(D.index(), decl);
      for (std::size_t t = 0; t < T; ++t) vals.push_back(derived_value(D, f, t));
    }
    std::vector<int> least(L + 1, L + 1);
    for (std::size_t a = 0; a < T; ++a)
      for (std::size_t c = 0; c < T; ++c) {
        auto x = decode_tuple(a, m, n), y = decode_tuple(c, m, n);
        const int s = pair_distance(x, y);
        for (int i = 0; i <= L; ++i) {
          bool within;
          if (mu >= 0) {
            within = view.bit(mu, a * T + c, Dir::LEQ, i) && view.bit(mu, c * T + a, Dir::LEQ, i);
          } else {
            const Rational& u = vals[a].value;
            const Rational& v = vals[c].value;
            within = (u > v ? u - v : v - u) <= Rational(i, L);
          }
          if (!within) least[i] = std::min(least[i], s);
        }
      }
    out.relations.push_back(table(least));
  }
  return out;
}

ContinuousStructure decode(const DiscreteStructure& D) {
  DerivedMetric dm = derived_metric(D);
  if (!dm.exact()) throw DecodeError("derived metric has a nonzero gap; decode needs grid-exact tables");
  auto rels = derived_relations(D);
  DerivedModuli mods = derived_moduli(D);
  ContinuousStructure M;
  M.sig = D.sigf.sig();
  for (std::size_t f = 0; f < M.sig.functions.size(); ++f) M.sig.functions[f].modulus = mods.functions[f];
  for (std::size_t r = 0; r < M.sig.relations.size(); ++r) M.sig.relations[r].modulus = mods.relations[r];
  M.universe = D.carrier.universe;
  M.metric = dm.values;
  M.func_tables = D.carrier.func_tables;
  for (const auto& col : rels) {
    std::vector<Rational> vals;
    for (const auto& v : col) {
      if (v.gap != Rational(0)) throw DecodeError("derived relation value has a nonzero gap");
      vals.push_back(v.value);
    }
    M.rel_tables.push_back(std::move(vals));
  }
  try {
    validate_structure(M);
  } catch (const ValidationError& e) {
    std::string msg = std::string("decoded structure is invalid: ") + e.what();
    if (!e.violations.empty()) msg += " (" + e.violations.front().kind + ": " + e.violations.front().detail + ")";
    throw DecodeError(msg);
  }
  return M;
}

SupInfResult sup_inf_exact(const DiscreteStructure& D, int f, std::size_t t) {
  if (!D.oracle) return sup_inf_grid(D, f, t);
  const Rational& v = D.oracle->value(f, t);
  auto geq = [&](const Rational& r) { return v >= r; };
  auto leq = [&](const Rational& r) { return v <= r; };
  SupInfResult res;
  // Stern-Brocot descent: the only point where both relations hold.
  mpz_class pl = 0, ql = 1, ph = 1, qh = 1;
  Rational m;
  if (geq(Rational(1))) {
    m = Rational(1);
  } else if (leq(Rational(0))) {
    m = Rational(0);
  } else {
    for (;;) {
      mpq_class mq(mpz_class(pl + ph), mpz_class(ql + qh));
      m = Rational(mq);
      const bool g = geq(m), l = leq(m);
      if (g && l) break;
      if (g) {
        pl += ph;
        ql += qh;
      } else {
        ph += pl;
        qh += ql;
      }
    }
  }
  res.sup_geq = m;
  res.inf_leq = m;
  // The sets must be [0, m] and [m, 1] at every grid point.
  const int L = D.grid_L();
  bool consistent = true;
  for (int i = 0; i <= L && consistent; ++i) {
    Rational r(i, L);
    consistent = geq(r) == (r <= m) && leq(r) == (r >= m);
  }
  res.equal = consistent;
  return res;
}

SupInfResult sup_inf_grid(const DiscreteStructure& D, int f, std::size_t t) {
  ThresholdView view(D);
  const int L = D.grid_L();
  SupInfResult res;
  const int s = view.geq_sup(f, t), i = view.leq_inf(f, t);
  res.sup_geq = Rational(std::max(s, 0), L);
  res.inf_leq = Rational(std::min(i, L), L);
  res.equal = s >= 0 && i <= L && s == i;
  return res;
}

namespace {

bool same_bits(const DiscreteStructure& A, const DiscreteStructure& B, std::string& why) {
  if (A.size() != B.size() || !(A.carrier == B.carrier)) {
    why = "carriers differ";
    return false;
  }
  ThresholdView va(A), vb(B);
  const auto& idx = A.index();
  for (std::size_t f = 0; f < idx.size(); ++f) {
    const std::size_t T = tuple_count(A.size(), idx.at(static_cast<int>(f)).arity);
    for (std::size_t t = 0; t < T; ++t)
      for (int i = 0; i <= A.grid_L(); ++i)
        for (Dir d : {Dir::GEQ, Dir::LEQ})
          if (va.bit(static_cast<int>(f), t, d, i) != vb.bit(static_cast<int>(f), t, d, i)) {
            why = "bit " + idx.at(static_cast<int>(f)).key + " " + dir_name(d) + " " + Rational(i, A.grid_L()).str() +
                  " at " + tuple_names(A.carrier, decode_tuple(t, idx.at(static_cast<int>(f)).arity, A.size()));
            return false;
          }
  }
  return true;
}

}  // namespace

RoundtripReport roundtrip_check(const ContinuousStructure& M, const DiscreteSignatureFragment& sigf) {
  RoundtripReport rep;
  DiscreteStructure Dext = materialize(encode(M, sigf));
  ContinuousStructure back;
  try {
    back = decode(Dext);
  } catch (const DecodeError& e) {
    rep.clause = "decode";
    rep.detail = e.what();
    return rep;
  }
  if (back.universe != M.universe) {
    rep.clause = "decode-identity";
    rep.detail = "universe differs";
  } else if (back.metric != M.metric) {
    rep.clause = "decode-identity";
    for (std::size_t k = 0; k < M.metric.size(); ++k)
      if (back.metric[k] != M.metric[k]) {
        rep.detail = "metric differs at (" + M.universe[k / M.size()] + "," + M.universe[k % M.size()] + "): " +
                     back.metric[k].str() + " vs " + M.metric[k].str();
        break;
      }
  } else if (back.func_tables != M.func_tables) {
    rep.clause = "decode-identity";
    rep.detail = "function tables differ";
  } else if (back.rel_tables != M.rel_tables) {
    rep.clause = "decode-identity";
    for (std::size_t r = 0; r < M.rel_tables.size() && rep.detail.empty(); ++r)
      for (std::size_t t = 0; t < M.rel_tables[r].size(); ++t)
        if (back.rel_tables[r][t] != M.rel_tables[r][t]) {
          rep.detail = "relation " + M.sig.relations[r].name + " differs: " + back.rel_tables[r][t].str() + " vs " +
                       M.rel_tables[r][t].str();
          break;
        }
  } else {
    rep.decode_identity = true;
  }
  DiscreteStructure again = materialize(encode(back, sigf));
  std::string why;
  rep.encode_identity = same_bits(again, Dext, why);
  if (!rep.encode_identity && rep.clause.empty()) {
    rep.clause = "encode-identity";
    rep.detail = why;
  }
  return rep;
}

std::optional<std::string> substructure_mismatch(const DiscreteStructure& A, const DiscreteStructure& B) {
  const auto& ia = A.index();
  const auto& ib = B.index();
  if (A.grid_L() != B.grid_L() || ia.size() != ib.size()) return "fragments differ";
  for (std::size_t f = 0; f < ia.size(); ++f)
    if (ia.at(static_cast<int>(f)).key != ib.at(static_cast<int>(f)).key) return "fragments differ";
  std::vector<int> to_b(A.size());
  for (std::size_t a = 0; a < A.size(); ++a) {
    to_b[a] = B.carrier.element_index(A.carrier.universe[a]);
    if (to_b[a] < 0) return "element " + A.carrier.universe[a] + " missing from the extension";
  }
  const auto& sig = A.sigf.sig();
  for (std::size_t fn = 0; fn < sig.functions.size(); ++fn) {
    const int m = sig.functions[fn].arity;
    const std::size_t T = tuple_count(A.size(), m);
    for (std::size_t t = 0; t < T; ++t) {
      auto x = decode_tuple(t, m, A.size());
      std::vector<int> y(m);
      for (int k = 0; k < m; ++k) y[k] = to_b[x[k]];
      const int fa = A.carrier.func_tables[fn][t];
      const int fb = B.carrier.func_tables[fn][encode_tuple(y, B.size())];
      if (to_b[fa] != fb) return "function " + sig.functions[fn].name + " disagrees at " + tuple_names(A.carrier, x);
    }
  }
  ThresholdView va(A), vb(B);
  for (std::size_t f = 0; f < ia.size(); ++f) {
    const int m = ia.at(static_cast<int>(f)).arity;
    const std::size_t T = tuple_count(A.size(), m);
    std::vector<int> y(m);
    for (std::size_t t = 0; t < T; ++t) {
      auto x = decode_tuple(t, m, A.size());
      for (int k = 0; k < m; ++k) y[k] = to_b[x[k]];
      const std::size_t tb = encode_tuple(y, B.size());
      for (int i = 0; i <= A.grid_L(); ++i)
        for (Dir d : {Dir::GEQ, Dir::LEQ})
          if (va.bit(static_cast<int>(f), t, d, i) != vb.bit(static_cast<int>(f), tb, d, i))
            return "relation " + ia.at(static_cast<int>(f)).key + " " + dir_name(d) + " " +
                   Rational(i, A.grid_L()).str() + " disagrees at " + tuple_names(A.carrier, x);
    }
  }
  return std::nullopt;
}

InessentialResult is_inessential_extension(const DiscreteStructure& A, const DiscreteStructure& B, int depth) {
  if (auto why = substructure_mismatch(A, B)) throw InputError("not a substructure: " + *why);
  const int dd = B.index().dist_atom();
  const int L = B.grid_L();
  ThresholdView vb(B);
  InessentialResult res;
  for (std::size_t b = 0; b < B.size(); ++b)
    for (int n = 1; n <= depth; ++n) {
      // d < 1/n as d <= largest grid value strictly below 1/n
      const int g = static_cast<int>(Rational(1, n).ceil_mul(L)) - 1;
      bool found = false;
      for (std::size_t a = 0; a < A.size() && !found; ++a) {
        const std::size_t ab = static_cast<std::size_t>(B.carrier.element_index(A.carrier.universe[a]));
        found = vb.bit(dd, b * B.size() + ab, Dir::LEQ, g);
      }
      if (!found) {
        res.ok = false;
        res.element = B.carrier.universe[b];
        res.n = n;
        return res;
      }
    }
  return res;
}

bool TfaeReport::pass() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.pass; });
}

TfaeReport check_tfae_witness(const DiscreteStructure& A, const DiscreteStructure& B, const DiscreteStructure& C,
                              int depth) {
  TfaeReport rep;
  auto sub = [&](const char* name, const DiscreteStructure& X) {
    auto why = substructure_mismatch(X, C);
    rep.clauses.push_back({name, !why, why.value_or("")});
    return !why;
  };
  sub("A ⊆ C", A);
  const bool b_in_c = sub("B ⊆ C", B);
  InstanceSet set = generate_tdense(C.sigf, C.carrier, C.sigf.fragment().omega_N);
  VerdictReport v = check_tdense(materialize(C), set);
  std::string detail;
  for (const auto& s : v.schemes)
    if (s.fail) {
      detail = std::string("scheme ") + scheme_name(s.scheme) + " fails";
      break;
    }
  rep.clauses.push_back({"C ⊨ T_dense", v.ok(), detail});
  if (b_in_c) {
    InessentialResult ie = is_inessential_extension(B, C, depth);
    rep.clauses.push_back({"C inessential over B", ie.ok,
                           ie.ok ? "" : "no element of B near " + ie.element + " at n=" + std::to_string(ie.n)});
  } else {
    rep.clauses.push_back({"C inessential over B", false, "B is not a substructure of C"});
  }
  return rep;
}

CompletableVerdict check_completable(const LevelFamily& fam, int depth) {
  CompletableVerdict res;
  res.depth = depth;
  if (fam.levels.empty()) return res;
  const DiscreteStructure& top = fam.levels.back();
  const auto& sig = top.sigf.sig();
  const DerivedMetric dm = derived_metric(top);
  const std::size_t n = top.size();
  const int K = static_cast<int>(fam.levels.size()) - 1;

  // Per level: derived relation values and the element map into the top level.
  std::vector<std::vector<std::vector<DerivedValue>>> rel_at(fam.levels.size());
  std::vector<std::vector<int>> to_top(fam.levels.size());
  for (int k = 0; k <= K; ++k) {
    const auto& Dk = fam.levels[k];
    rel_at[k] = derived_relations(Dk);
    for (const auto& name : Dk.carrier.universe) to_top[k].push_back(top.carrier.element_index(name));
  }
  // first/last element of level k within 1/2^k of each top element
  auto pick = [&](int k, std::size_t a, bool last) -> int {
    const Rational bound(1, 1L << k);
    int found = -1;
    for (std::size_t e = 0; e < to_top[k].size(); ++e)
      if (dm.at(static_cast<std::size_t>(to_top[k][e]), a) <= bound) {
        found = static_cast<int>(e);
        if (!last) break;
      }
    return found;
  };

  for (int k = std::max(depth, 0); k <= K; ++k) {
    const auto& Dk = fam.levels[k];
    const Rational eps = k == 0 ? Rational(2) : Rational(1, 1L << (k - 1));
    for (std::size_t r = 0; r < sig.relations.size(); ++r) {
      const auto& decl = sig.relations[r];
      std::vector<Term> vars;
      for (int j = 0; j < decl.arity; ++j) vars.push_back(Term::var("x" + std::to_string(j)));
      const Rational bound = modulus_at(Formula::rel(decl.name, vars), sig, eps);
      const std::size_t T = tuple_count(n, decl.arity);
      for (std::size_t t = 0; t < T; ++t) {
        auto a = decode_tuple(t, decl.arity, n);
        std::vector<int> c1(decl.arity), c2(decl.arity);
        bool ok = true;
        for (int j = 0; j < decl.arity && ok; ++j) {
          c1[j] = pick(k, a[j], false);
          c2[j] = pick(k, a[j], true);
          ok = c1[j] >= 0;
        }
        if (!ok) continue;
        const Rational& u = rel_at[k][r][encode_tuple(c1, Dk.size())].value;
        const Rational& v = rel_at[k][r][encode_tuple(c2, Dk.size())].value;
        ++res.comparisons;
        if ((u > v ? u - v : v - u) > bound) {
          res.pass = false;
          res.witness = decl.name + " at level " + std::to_string(k) + ": " + tuple_names(Dk.carrier, c1) + " = " +
                        u.str() + " vs " + tuple_names(Dk.carrier, c2) + " = " + v.str() + " near " +
                        tuple_names(top.carrier, a) + ", bound " + bound.str();
          return res;
        }
      }
    }
    for (std::size_t fn = 0; fn < sig.functions.size(); ++fn) {
      const auto& decl = sig.functions[fn];
      std::vector<Term> vars;
      for (int j = 0; j < decl.arity; ++j) vars.push_back(Term::var("x" + std::to_string(j)));
      const Rational bound = term_modulus(Term::app(decl.name, vars), sig, eps);
      const std::size_t T = tuple_count(n, decl.arity);
      for (std::size_t t = 0; t < T; ++t) {
        auto a = decode_tuple(t, decl.arity, n);
        std::vector<int> c1(decl.arity), c2(decl.arity);
        bool ok = true;
        for (int j = 0; j < decl.arity && ok; ++j) {
          c1[j] = pick(k, a[j], false);
          c2[j] = pick(k, a[j], true);
          ok = c1[j] >= 0;
        }
        if (!ok) continue;
        const int f1 = to_top[k][Dk.carrier.func_tables[fn][encode_tuple(c1, Dk.size())]];
        const int f2 = to_top[k][Dk.carrier.func_tables[fn][encode_tuple(c2, Dk.size())]];
        ++res.comparisons;
        if (dm.at(f1, f2) > bound) {
          res.pass = false;
          res.witness = decl.name + " at level " + std::to_string(k) + ": images " + top.carrier.universe[f1] +
                        " and " + top.carrier.universe[f2] + " are " + dm.at(f1, f2).str() + " apart, bound " +
                        bound.str();
          return res;
        }
      }
    }
  }
  return res;
}

}  // namespace cdense

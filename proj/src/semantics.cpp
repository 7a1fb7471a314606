#include "cdense/semantics.hpp"

#include <algorithm>

#include "cdense/kernels.hpp"

namespace cdense {

std::size_t tuple_count(std::size_t n, int arity) {
  if (n == 0) return 0;
  std::size_t c = 1;
  for (int i = 0; i < arity; ++i) c *= n;
  return c;
}

std::size_t encode_tuple(const int* elems, int arity, std::size_t n) {
  std::size_t idx = 0;
  for (int i = 0; i < arity; ++i) idx = idx * n + static_cast<std::size_t>(elems[i]);
  return idx;
}

void decode_tuple(std::size_t idx, int arity, std::size_t n, int* out) {
  for (int i = arity - 1; i >= 0; --i) {
    out[i] = static_cast<int>(idx % n);
    idx /= n;
  }
}

int ContinuousStructure::element_index(const std::string& name) const {
  auto it = std::find(universe.begin(), universe.end(), name);
  return it == universe.end() ? -1 : static_cast<int>(it - universe.begin());
}

int eval_term(const ContinuousStructure& M, const Term& t, const Assignment& a) {
  if (t.is_var()) {
    auto it = a.find(t.name);
    if (it == a.end()) throw UnboundVariable("unbound variable " + t.name);
    return it->second;
  }
  int fi = M.sig.function_index(t.name);
  if (fi < 0) throw SymbolError("unknown function symbol \"" + t.name + "\"");
  std::vector<int> args;
  args.reserve(t.args.size());
  for (const auto& s : t.args) args.push_back(eval_term(M, s, a));
  return M.func_tables[fi][encode_tuple(args, M.size())];
}

Rational eval(const ContinuousStructure& M, const Formula& f, const Assignment& a) {
  switch (f.kind) {
    case FKind::Zero: return Rational(0);
    case FKind::One: return Rational(1);
    case FKind::Half: return eval(M, f.kids[0], a) * Rational(1, 2);
    case FKind::Monus: return monus(eval(M, f.kids[0], a), eval(M, f.kids[1], a));
    case FKind::Sup:
    case FKind::Inf: {
      Assignment b = a;
      std::optional<Rational> best;
      for (std::size_t e = 0; e < M.size(); ++e) {
        b[f.name] = static_cast<int>(e);
        Rational v = eval(M, f.kids[0], b);
        if (!best || (f.kind == FKind::Sup ? v > *best : v < *best)) best = std::move(v);
      }
      // Empty universes have no sensible sup/inf; loaders reject them.
      return best ? *best : Rational(f.kind == FKind::Sup ? 0 : 1);
    }
    case FKind::Dist: return M.d(eval_term(M, f.terms[0], a), eval_term(M, f.terms[1], a));
    case FKind::Rel: {
      int ri = M.sig.relation_index(f.name);
      if (ri < 0) throw SymbolError("unknown relation symbol \"" + f.name + "\"");
      std::vector<int> args;
      for (const auto& t : f.terms) args.push_back(eval_term(M, t, a));
      return M.rel_tables[ri][encode_tuple(args, M.size())];
    }
  }
  return Rational(0);
}

// ---------------------------------------------------------------- validation

std::vector<Violation> check_metric(const ContinuousStructure& M) {
  std::vector<Violation> out;
  const std::size_t n = M.size();
  const auto& U = M.universe;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const Rational& v = M.d(a, b);
      if (v < Rational(0) || v > Rational(1))
        out.push_back({"range", "d", {U[a], U[b]}, "d = " + v.str() + " outside [0,1]"});
      if ((a == b) != (v == Rational(0)))
        out.push_back({"identity", "d", {U[a], U[b]}, "d = " + v.str()});
      if (a < b && !(v == M.d(b, a)))
        out.push_back({"symmetry", "d", {U[a], U[b]}, v.str() + " vs " + M.d(b, a).str()});
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (M.d(a, c) > M.d(a, b) + M.d(b, c))
          out.push_back({"triangle", "d", {U[a], U[b], U[c]},
                         "d(" + U[a] + "," + U[c] + ") = " + M.d(a, c).str() + " > " +
                             (M.d(a, b) + M.d(b, c)).str()});
  return out;
}

namespace {

// Visits every ordered pair of tuples with its max-coordinate distance.
template <typename Fn>
void for_tuple_pairs(const ContinuousStructure& M, int arity, Fn&& fn) {
  const std::size_t n = M.size();
  const std::size_t T = tuple_count(n, arity);
  std::vector<int> x(arity), y(arity);
  for (std::size_t i = 0; i < T; ++i) {
    decode_tuple(i, arity, n, x.data());
    for (std::size_t j = 0; j < T; ++j) {
      decode_tuple(j, arity, n, y.data());
      Rational dist(0);
      for (int k = 0; k < arity; ++k) dist = rmax(dist, M.d(x[k], y[k]));
      fn(i, j, x, y, dist);
    }
  }
}

std::string tuple_names(const ContinuousStructure& M, const std::vector<int>& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + M.universe[t[i]];
  return s + ")";
}

}  // namespace

std::vector<Violation> check_uniform_continuity(const ContinuousStructure& M) {
  std::vector<Violation> out;
  auto run = [&](const SymbolDecl& s, auto&& diff) {
    if (s.modulus.entries.empty()) return;
    for_tuple_pairs(M, s.arity, [&](std::size_t i, std::size_t j, const auto& x, const auto& y, const Rational& dist) {
      if (i >= j) return;
      Rational dv = diff(i, j);
      for (const auto& [r, delta] : s.modulus.entries)
        if (dist < delta && dv > r)
          out.push_back({"continuity", s.name, {tuple_names(M, x), tuple_names(M, y)},
                         "distance " + dist.str() + " < " + delta.str() + " but difference " + dv.str() + " > " +
                             r.str()});
    });
  };
  for (std::size_t f = 0; f < M.sig.functions.size(); ++f)
    run(M.sig.functions[f], [&](std::size_t i, std::size_t j) { return M.d(M.func_tables[f][i], M.func_tables[f][j]); });
  for (std::size_t r = 0; r < M.sig.relations.size(); ++r)
    run(M.sig.relations[r], [&](std::size_t i, std::size_t j) {
      const auto& t = M.rel_tables[r];
      return t[i] > t[j] ? t[i] - t[j] : t[j] - t[i];
    });
  return out;
}

std::vector<Violation> check_tables(const ContinuousStructure& M) {
  std::vector<Violation> out;
  const std::size_t n = M.size();
  if (n == 0) out.push_back({"shape", "", {}, "empty universe"});
  if (M.metric.size() != n * n) out.push_back({"shape", "d", {}, "metric table has wrong size"});
  if (M.func_tables.size() != M.sig.functions.size() || M.rel_tables.size() != M.sig.relations.size()) {
    out.push_back({"shape", "", {}, "table count does not match signature"});
    return out;
  }
  for (std::size_t f = 0; f < M.func_tables.size(); ++f) {
    if (M.func_tables[f].size() != tuple_count(n, M.sig.functions[f].arity))
      out.push_back({"shape", M.sig.functions[f].name, {}, "function table not total"});
    for (int v : M.func_tables[f])
      if (v < 0 || static_cast<std::size_t>(v) >= n)
        out.push_back({"range", M.sig.functions[f].name, {}, "function value outside universe"});
  }
  for (std::size_t r = 0; r < M.rel_tables.size(); ++r) {
    if (M.rel_tables[r].size() != tuple_count(n, M.sig.relations[r].arity))
      out.push_back({"shape", M.sig.relations[r].name, {}, "relation table not total"});
    for (const auto& v : M.rel_tables[r])
      if (v < Rational(0) || v > Rational(1))
        out.push_back({"range", M.sig.relations[r].name, {}, "value " + v.str() + " outside [0,1]"});
  }
  return out;
}

void validate_structure(const ContinuousStructure& M) {
  M.sig.validate();
  if (auto v = check_tables(M); !v.empty()) throw ValidationError("malformed structure tables", std::move(v));
  if (auto v = check_metric(M); !v.empty()) throw ValidationError("metric axioms violated", std::move(v));
  if (auto v = check_uniform_continuity(M); !v.empty())
    throw ValidationError("uniform continuity violated", std::move(v));
}

ModulusTable measured_modulus(const ContinuousStructure& M, bool is_function, int symbol, int grid_L) {
  const SymbolDecl& s = is_function ? M.sig.functions[symbol] : M.sig.relations[symbol];
  std::vector<std::pair<Rational, Rational>> pairs;  // (distance, difference)
  for_tuple_pairs(M, s.arity, [&](std::size_t i, std::size_t j, const auto&, const auto&, const Rational& dist) {
    if (i >= j) return;
    Rational dv;
    if (is_function) {
      dv = M.d(M.func_tables[symbol][i], M.func_tables[symbol][j]);
    } else {
      const auto& t = M.rel_tables[symbol];
      dv = t[i] > t[j] ? t[i] - t[j] : t[j] - t[i];
    }
    pairs.emplace_back(std::move(dist), std::move(dv));
  });
  ModulusTable out;
  for (int i = 0; i <= grid_L; ++i) {
    Rational r(i, grid_L);
    Rational bound(1);  // least distance of a violating pair
    bool violated = false;
    for (const auto& [dist, dv] : pairs)
      if (dv > r && (!violated || dist < bound)) {
        bound = dist;
        violated = true;
      }
    // Largest grid delta <= bound.
    out.entries.emplace_back(r, violated ? Rational(bound.floor_mul(grid_L), grid_L) : Rational(1));
  }
  return out;
}

TheoryReport models_theory(const ContinuousStructure& M, const std::vector<Condition>& T) {
  TheoryReport rep;
  for (const auto& c : T) {
    if (!free_vars(c.formula).empty())
      throw InputError("condition is not closed: " + print_formula(c.formula));
    Rational v = eval(M, c.formula, {});
    bool ok = v == Rational(0);
    rep.pass = rep.pass && ok;
    rep.results.push_back({print_formula(c.formula), v, ok});
  }
  return rep;
}

void require_substructure(const ContinuousStructure& M, const ContinuousStructure& N) {
  if (!(M.sig == N.sig)) {
    // Moduli may legitimately differ; symbols and arities may not.
    auto same_symbols = [](const std::vector<SymbolDecl>& a, const std::vector<SymbolDecl>& b) {
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].name != b[i].name || a[i].arity != b[i].arity) return false;
      return true;
    };
    if (!same_symbols(M.sig.functions, N.sig.functions) || !same_symbols(M.sig.relations, N.sig.relations))
      throw NotSubstructure("signatures differ");
  }
  const std::size_t m = M.size(), n = N.size();
  std::vector<int> emb(m);
  for (std::size_t i = 0; i < m; ++i) {
    emb[i] = N.element_index(M.universe[i]);
    if (emb[i] < 0) throw NotSubstructure("element " + M.universe[i] + " missing from the larger structure");
  }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (!(M.d(a, b) == N.d(emb[a], emb[b])))
        throw NotSubstructure("metric disagrees on (" + M.universe[a] + "," + M.universe[b] + ")");
  auto check = [&](const SymbolDecl& s, auto&& same) {
    const std::size_t T = tuple_count(m, s.arity);
    std::vector<int> x(s.arity), y(s.arity);
    for (std::size_t i = 0; i < T; ++i) {
      decode_tuple(i, s.arity, m, x.data());
      for (int k = 0; k < s.arity; ++k) y[k] = emb[x[k]];
      if (!same(i, encode_tuple(y, n))) throw NotSubstructure(s.name + " disagrees on " + tuple_names(M, x));
    }
  };
  for (std::size_t f = 0; f < M.sig.functions.size(); ++f)
    check(M.sig.functions[f], [&](std::size_t i, std::size_t j) { return emb[M.func_tables[f][i]] == N.func_tables[f][j]; });
  for (std::size_t r = 0; r < M.sig.relations.size(); ++r)
    check(M.sig.relations[r], [&](std::size_t i, std::size_t j) { return M.rel_tables[r][i] == N.rel_tables[r][j]; });
}

ElementarityResult check_phi_elementary(const ContinuousStructure& M, const ContinuousStructure& N,
                                        const std::vector<Formula>& phi) {
  require_substructure(M, N);
  ElementarityResult res;
  if (phi.empty()) return res;
  Fragment frag = fragment_close(phi, M.sig, 2, 2);
  FragmentIndex idx(M.sig, frag);
  ValueTables vm = kernels::value_tables(M, idx);
  ValueTables vn = kernels::value_tables(N, idx);
  const std::size_t m = M.size(), n = N.size();
  std::vector<int> emb(m);
  for (std::size_t i = 0; i < m; ++i) emb[i] = N.element_index(M.universe[i]);
  for (const auto& f : phi) {
    int id = idx.find(f);
    const auto& info = idx.at(id);
    const std::size_t T = tuple_count(m, info.arity);
    std::vector<int> x(info.arity), y(info.arity);
    for (std::size_t i = 0; i < T; ++i) {
      decode_tuple(i, info.arity, m, x.data());
      for (int k = 0; k < info.arity; ++k) y[k] = emb[x[k]];
      const Rational& a = vm.value(id, i);
      const Rational& b = vn.value(id, encode_tuple(y, n));
      if (!(a == b)) {
        std::vector<std::string> names;
        for (int e : x) names.push_back(M.universe[e]);
        res.elementary = false;
        res.witness = ElementarityWitness{info.key, names, a, b};
        return res;
      }
    }
  }
  return res;
}

ContinuousStructure restrict_structure(const ContinuousStructure& M, const std::vector<int>& subset) {
  ContinuousStructure S;
  S.sig = M.sig;
  const std::size_t m = subset.size(), n = M.size();
  std::vector<int> back(n, -1);
  for (std::size_t i = 0; i < m; ++i) {
    S.universe.push_back(M.universe[subset[i]]);
    back[subset[i]] = static_cast<int>(i);
  }
  S.metric.resize(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) S.metric[a * m + b] = M.d(subset[a], subset[b]);
  auto lift = [&](std::size_t i, int arity) {
    std::vector<int> x(arity);
    decode_tuple(i, arity, m, x.data());
    for (auto& e : x) e = subset[e];
    return encode_tuple(x, n);
  };
  for (std::size_t f = 0; f < M.sig.functions.size(); ++f) {
    const int ar = M.sig.functions[f].arity;
    std::vector<int> t(tuple_count(m, ar));
    for (std::size_t i = 0; i < t.size(); ++i) {
      int v = back[M.func_tables[f][lift(i, ar)]];
      if (v < 0) throw NotSubstructure("subset not closed under " + M.sig.functions[f].name);
      t[i] = v;
    }
    S.func_tables.push_back(std::move(t));
  }
  for (std::size_t r = 0; r < M.sig.relations.size(); ++r) {
    const int ar = M.sig.relations[r].arity;
    std::vector<Rational> t(tuple_count(m, ar));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = M.rel_tables[r][lift(i, ar)];
    S.rel_tables.push_back(std::move(t));
  }
  return S;
}

}  // namespace cdense

#include "cdense/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace cdense::kernels {

int max_threads() { return omp_get_max_threads(); }

namespace {

void fill_grid_bounds(ValueTables& out, int f) {
  const auto& vals = out.values[f];
  auto& lo = out.lo[f];
  auto& hi = out.hi[f];
  lo.resize(vals.size());
  hi.resize(vals.size());
  for (std::size_t t = 0; t < vals.size(); ++t) {
    lo[t] = static_cast<int>(vals[t].floor_mul(out.grid_L));
    hi[t] = static_cast<int>(vals[t].ceil_mul(out.grid_L));
  }
}

ValueTables empty_tables(const ContinuousStructure& M, const FragmentIndex& idx) {
  ValueTables out;
  out.grid_L = idx.grid_L();
  out.n = M.size();
  out.values.resize(idx.size());
  out.lo.resize(idx.size());
  out.hi.resize(idx.size());
  return out;
}

std::size_t child_index(const std::vector<int>& map, const int* slots, std::size_t n) {
  std::size_t idx = 0;
  for (int s : map) idx = idx * n + static_cast<std::size_t>(slots[s]);
  return idx;
}

}  // namespace

ValueTables value_tables(const ContinuousStructure& M, const FragmentIndex& idx) {
  ValueTables out = empty_tables(M, idx);
  const std::size_t n = M.size();
  const Rational zero(0), one(1), half(1, 2);
  for (int f : idx.bottom_up()) {
    const FormulaInfo& fi = idx.at(f);
    const std::size_t T = tuple_count(n, fi.arity);
    auto& vals = out.values[f];
    vals.assign(T, Rational(0));
    const long long TT = static_cast<long long>(T);
#pragma omp parallel for schedule(static)
    for (long long ti = 0; ti < TT; ++ti) {
      const std::size_t t = static_cast<std::size_t>(ti);
      int slots[32];
      decode_tuple(t, fi.arity, n, slots);
      switch (fi.kind) {
        case FKind::Zero: vals[t] = zero; break;
        case FKind::One: vals[t] = one; break;
        case FKind::Half: vals[t] = out.values[fi.child[0]][child_index(fi.child_map[0], slots, n)] * half; break;
        case FKind::Monus:
          vals[t] = monus(out.values[fi.child[0]][child_index(fi.child_map[0], slots, n)],
                          out.values[fi.child[1]][child_index(fi.child_map[1], slots, n)]);
          break;
        case FKind::Sup:
        case FKind::Inf: {
          const auto& cv = out.values[fi.child[0]];
          const Rational* best = nullptr;
          for (std::size_t e = 0; e < n; ++e) {
            slots[fi.arity] = static_cast<int>(e);
            const Rational& v = cv[child_index(fi.child_map[0], slots, n)];
            if (!best || (fi.kind == FKind::Sup ? v > *best : v < *best)) best = &v;
          }
          vals[t] = *best;
          break;
        }
        case FKind::Dist:
          vals[t] = M.d(eval_compiled_term(fi.terms[0], slots, n, M.func_tables),
                        eval_compiled_term(fi.terms[1], slots, n, M.func_tables));
          break;
        case FKind::Rel: {
          int args[32];
          for (std::size_t k = 0; k < fi.terms.size(); ++k)
            args[k] = eval_compiled_term(fi.terms[k], slots, n, M.func_tables);
          vals[t] = M.rel_tables[fi.rel][encode_tuple(args, static_cast<int>(fi.terms.size()), n)];
          break;
        }
      }
    }
    fill_grid_bounds(out, f);
  }
  return out;
}

ValueTables value_tables_serial(const ContinuousStructure& M, const FragmentIndex& idx) {
  ValueTables out = empty_tables(M, idx);
  const std::size_t n = M.size();
  for (std::size_t f = 0; f < idx.size(); ++f) {
    const FormulaInfo& fi = idx.at(static_cast<int>(f));
    const std::size_t T = tuple_count(n, fi.arity);
    std::vector<int> slots(fi.arity);
    for (std::size_t t = 0; t < T; ++t) {
      decode_tuple(t, fi.arity, n, slots.data());
      Assignment a;
      for (int k = 0; k < fi.arity; ++k) a[fi.vars[k]] = slots[k];
      out.values[f].push_back(eval(M, fi.formula, a));
    }
    fill_grid_bounds(out, static_cast<int>(f));
  }
  return out;
}

namespace {

TruthTables empty_truth(const ValueTables& v, const FragmentIndex& idx) {
  TruthTables tt;
  tt.grid_L = v.grid_L;
  tt.n = v.n;
  tt.bits.resize(idx.size());
  return tt;
}

}  // namespace

TruthTables materialize_tables(const ValueTables& v, const FragmentIndex& idx) {
  TruthTables tt = empty_truth(v, idx);
  const int L = v.grid_L;
  const long long F = static_cast<long long>(idx.size());
#pragma omp parallel for schedule(dynamic)
  for (long long fi = 0; fi < F; ++fi) {
    const int f = static_cast<int>(fi);
    const std::size_t T = v.values[f].size();
    auto& bits = tt.bits[f];
    bits.assign(T * 2 * static_cast<std::size_t>(L + 1), 0);
    for (std::size_t t = 0; t < T; ++t) {
      const int lo = v.lo[f][t], hi = v.hi[f][t];
      for (int i = 0; i <= L; ++i) {
        bits[tt.offset(t, Dir::GEQ, i)] = i <= lo;
        bits[tt.offset(t, Dir::LEQ, i)] = i >= hi;
      }
    }
  }
  return tt;
}

TruthTables materialize_tables_serial(const ValueTables& v, const FragmentIndex& idx) {
  TruthTables tt = empty_truth(v, idx);
  const int L = v.grid_L;
  for (std::size_t f = 0; f < idx.size(); ++f) {
    const std::size_t T = v.values[f].size();
    tt.bits[f].assign(T * 2 * static_cast<std::size_t>(L + 1), 0);
    for (std::size_t t = 0; t < T; ++t)
      for (int i = 0; i <= L; ++i) {
        Rational r(i, L);
        tt.set(static_cast<int>(f), t, Dir::GEQ, i, v.values[f][t] >= r);
        tt.set(static_cast<int>(f), t, Dir::LEQ, i, v.values[f][t] <= r);
      }
  }
  return tt;
}

// ---------------------------------------------------------------- instance evaluation

namespace {

class Evaluator {
 public:
  Evaluator(const DiscreteStructure& D, const InstanceSet& set)
      : D_(D), view_(D), set_(set), L_(set.grid_L), oracle_(D.intensional()) {}

  Tri eval(std::uint32_t id) const {
    const Node& nd = set_.nodes[id];
    switch (nd.op) {
      case Op::True: return Tri::True;
      case Op::False: return Tri::False;
      case Op::Lit: return lit(nd);
      case Op::Not: return negate(eval(nd.a));
      case Op::And: {
        Tri acc = Tri::True;
        for (std::uint32_t k = 0; k < nd.b && acc != Tri::False; ++k) acc = std::min(acc, eval(set_.kids[nd.a + k]));
        return acc;
      }
      case Op::Or: {
        Tri acc = Tri::False;
        for (std::uint32_t k = 0; k < nd.b && acc != Tri::True; ++k) acc = std::max(acc, eval(set_.kids[nd.a + k]));
        return acc;
      }
      case Op::Implies: {
        Tri a = eval(nd.a);
        if (a == Tri::False) return Tri::True;
        return std::max(negate(a), eval(nd.b));
      }
      case Op::Iff: {
        Tri a = eval(nd.a), b = eval(nd.b);
        if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
        return tri(a == b);
      }
      case Op::Limit: return oracle_ ? eval(nd.b) : eval(nd.a);
    }
    return Tri::Unknown;
  }

 private:
  static Tri negate(Tri t) { return static_cast<Tri>(2 - static_cast<int>(t)); }

  Tri lit(const Node& nd) const {
    const int f = static_cast<int>(nd.a);
    const std::size_t t = nd.b;
    const std::uint32_t code = nd.c;
    const std::uint32_t P = static_cast<std::uint32_t>(2 * L_);
    if (code <= P) {
      if (code % 2 == 0) return tri(view_.bit(f, t, nd.dir, static_cast<int>(code / 2)));
      const int i = static_cast<int>(code / 2);
      return view_.refine(f, t, nd.dir, i, i + 1);
    }
    const std::size_t x = code - P - 1;
    if (oracle_) {
      const Rational& v = D_.oracle->value(f, t);
      return tri(nd.dir == Dir::GEQ ? v >= set_.extra[x] : v <= set_.extra[x]);
    }
    return view_.refine(f, t, nd.dir, set_.extra_grid[x].first, set_.extra_grid[x].second);
  }

  const DiscreteStructure& D_;
  ThresholdView view_;
  const InstanceSet& set_;
  int L_;
  bool oracle_;
};

}  // namespace

std::vector<Tri> evaluate(const DiscreteStructure& D, const InstanceSet& set) {
  Evaluator ev(D, set);
  std::vector<Tri> out(set.items.size());
  const long long N = static_cast<long long>(set.items.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < N; ++i) out[i] = ev.eval(set.items[i].root);
  return out;
}

std::vector<Tri> evaluate_serial(const DiscreteStructure& D, const InstanceSet& set) {
  Evaluator ev(D, set);
  std::vector<Tri> out;
  out.reserve(set.items.size());
  for (const auto& it : set.items) out.push_back(ev.eval(it.root));
  return out;
}

Tri evaluate_root(const DiscreteStructure& D, const InstanceSet& set, std::uint32_t root) {
  return Evaluator(D, set).eval(root);
}

std::vector<std::pair<int, std::size_t>> instance_bits(const InstanceSet& set, std::uint32_t root) {
  const int L = set.grid_L;
  const std::uint32_t P = static_cast<std::uint32_t>(2 * L);
  std::vector<std::pair<int, std::size_t>> out;
  auto add = [&](const Node& nd, int i) {
    const std::size_t off = (nd.b * 2 + static_cast<std::size_t>(nd.dir)) * static_cast<std::size_t>(L + 1) +
                            static_cast<std::size_t>(i);
    out.emplace_back(static_cast<int>(nd.a), off);
  };
  std::vector<std::uint32_t> stack{root};
  while (!stack.empty()) {
    const Node& nd = set.nodes[stack.back()];
    stack.pop_back();
    switch (nd.op) {
      case Op::True:
      case Op::False: break;
      case Op::Lit:
        if (nd.c <= P) {
          add(nd, static_cast<int>(nd.c / 2));
          if (nd.c % 2 == 1) add(nd, static_cast<int>(nd.c / 2) + 1);
        } else {
          const auto& g = set.extra_grid[nd.c - P - 1];
          for (int i : {g.first, g.second})
            if (i >= 0 && i <= L) add(nd, i);
        }
        break;
      case Op::Not: stack.push_back(nd.a); break;
      case Op::And:
      case Op::Or:
        for (std::uint32_t k = 0; k < nd.b; ++k) stack.push_back(set.kids[nd.a + k]);
        break;
      case Op::Implies:
      case Op::Iff:
        stack.push_back(nd.a);
        stack.push_back(nd.b);
        break;
      case Op::Limit: stack.push_back(nd.a); break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace cdense::kernels

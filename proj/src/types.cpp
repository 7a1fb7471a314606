#include "cdense/types.hpp"

#include <algorithm>
#include <limits>

#include "cdense/densify.hpp"

namespace cdense {

QfType qf_type(const DiscreteStructure& D, const std::vector<int>& subject, const std::vector<int>& params) {
  QfType q;
  q.subject_arity = subject.size();
  q.params = params;
  std::vector<int> elems(subject);
  elems.insert(elems.end(), params.begin(), params.end());
  const int P = static_cast<int>(elems.size());
  const int k = static_cast<int>(subject.size());
  ThresholdView view(D);
  const auto& idx = D.index();
  for (std::size_t f = 0; f < idx.size(); ++f) {
    const int m = idx.at(static_cast<int>(f)).arity;
    const std::size_t patterns = tuple_count(static_cast<std::size_t>(P), m);
    std::vector<int> pat(m), tuple(m);
    for (std::size_t p = 0; p < patterns; ++p) {
      decode_tuple(p, m, static_cast<std::size_t>(P), pat.data());
      if (std::none_of(pat.begin(), pat.end(), [&](int s) { return s < k; })) continue;
      for (int j = 0; j < m; ++j) tuple[j] = elems[pat[j]];
      const std::size_t t = encode_tuple(tuple, D.size());
      for (int i = 0; i <= D.grid_L(); ++i)
        for (Dir d : {Dir::GEQ, Dir::LEQ})
          q.facts.push_back({static_cast<int>(f), pat, i, d, view.bit(static_cast<int>(f), t, d, i)});
    }
  }
  return q;
}

bool same_type(const DiscreteStructure& D, const std::vector<int>& a, const std::vector<int>& b,
               const std::vector<int>& params) {
  if (a.size() != b.size()) return false;
  return qf_type(D, a, params).facts == qf_type(D, b, params).facts;
}

namespace {

std::vector<int> element_ids(const std::vector<std::string>& names, const std::vector<std::string>& universe) {
  std::vector<int> out;
  for (const auto& nm : names) {
    auto it = std::find(universe.begin(), universe.end(), nm);
    if (it == universe.end()) throw InputError("unknown element \"" + nm + "\"");
    out.push_back(static_cast<int>(it - universe.begin()));
  }
  return out;
}

Rational pow2_inv(int n) { return Rational(mpq_class(mpz_class(1), mpz_class(1) << n)); }

}  // namespace

std::optional<std::vector<int>> realized_in(const ContinuousStructure& M, const ContinuousTypeFragment& r) {
  const int l = static_cast<int>(r.vars.size());
  std::vector<std::vector<int>> pvals;
  for (const auto& c : r.conditions) pvals.push_back(element_ids(c.values, M.universe));
  const std::size_t T = tuple_count(M.size(), l);
  for (std::size_t t = 0; t < T; ++t) {
    auto a = decode_tuple(t, l, M.size());
    bool ok = true;
    for (std::size_t i = 0; i < r.conditions.size() && ok; ++i) {
      Assignment asg;
      for (int k = 0; k < l; ++k) asg[r.vars[k]] = a[k];
      for (std::size_t k = 0; k < r.conditions[i].params.size(); ++k) asg[r.conditions[i].params[k]] = pvals[i][k];
      ok = eval(M, r.conditions[i].formula, asg) == Rational(0);
    }
    if (ok) return a;
  }
  return std::nullopt;
}

SequenceType build_sequence_type(const ContinuousTypeFragment& r, const ContinuousStructure& M,
                                 const std::vector<int>& Bprime, int depth) {
  SequenceType st;
  st.vars = r.vars;
  st.depth = depth;
  std::vector<int> B(Bprime);
  std::sort(B.begin(), B.end());
  for (const auto& c : r.conditions) {
    SequenceEntry e;
    e.formula = c.formula;
    e.params = c.params;
    const auto b = element_ids(c.values, M.universe);
    for (int n = 0; n <= depth; ++n) {
      const Rational bound = pow2_inv(n);
      std::vector<std::string> step;
      for (int bk : b) {
        auto it = std::find_if(B.begin(), B.end(), [&](int x) { return M.d(x, bk) < bound; });
        if (it == B.end())
          throw InputError("no element of B' within " + bound.str() + " of " + M.universe[bk] + " (depth " +
                           std::to_string(n) + ")");
        step.push_back(M.universe[*it]);
      }
      e.chain.push_back(std::move(step));
    }
    st.index.push_back(std::move(e));
  }
  return st;
}

Rational sequence_threshold(const Formula& f, const Signature& sig, int n, int grid_L) {
  if (n == 0) return cap1(modulus_at(f, sig, Rational(2)));
  const Rational w = cap1(modulus_at(f, sig, pow2_inv(n - 1)));
  if (w == Rational(0)) return w;
  return Rational(w.ceil_mul(grid_L) - 1, grid_L);
}

Rational cauchy_threshold(int n) { return pow2_inv(n); }

namespace {

// Fragment id and tuple builder for one entry: formula vars come from the
// subject (by position in st.vars) or from the entry's parameters.
struct EntryPlan {
  int formula = -1;
  std::vector<int> source;  // >= 0: subject slot; < 0: -(param index) - 1
};

EntryPlan plan_entry(const DiscreteStructure& D, const SequenceType& st, const SequenceEntry& e) {
  EntryPlan p;
  p.formula = D.index().find(e.formula);
  if (p.formula < 0) throw InputError("sequence-type formula missing from fragment: " + print_formula(e.formula));
  for (const auto& v : D.index().at(p.formula).vars) {
    auto it = std::find(st.vars.begin(), st.vars.end(), v);
    if (it != st.vars.end()) {
      p.source.push_back(static_cast<int>(it - st.vars.begin()));
      continue;
    }
    auto jt = std::find(e.params.begin(), e.params.end(), v);
    if (jt == e.params.end()) throw InputError("variable " + v + " is neither a subject variable nor a parameter");
    p.source.push_back(-static_cast<int>(jt - e.params.begin()) - 1);
  }
  return p;
}

class SequenceChecker {
 public:
  SequenceChecker(const DiscreteStructure& D, const SequenceType& st) : D_(D), st_(st), view_(D) {
    for (const auto& e : st.index) {
      plans_.push_back(plan_entry(D, st, e));
      if (e.chain.size() < static_cast<std::size_t>(st.depth + 1))
        throw InputError("parameter chain shorter than the depth");
      std::vector<std::vector<int>> ids;
      for (const auto& step : e.chain) ids.push_back(element_ids(step, D.carrier.universe));
      chains_.push_back(std::move(ids));
    }
    dd_ = D.index().dist_atom();
  }

  // Formula constraints of step n on subject tuple a; empty string when satisfied.
  std::string formulas_at(int n, const std::vector<int>& a) const {
    for (std::size_t i = 0; i < plans_.size(); ++i) {
      const auto& p = plans_[i];
      std::vector<int> tuple;
      for (int s : p.source) tuple.push_back(s >= 0 ? a[s] : chains_[i][n][-s - 1]);
      const Rational thr = sequence_threshold(st_.index[i].formula, D_.sigf.sig(), n, D_.grid_L());
      if (view_.query(p.formula, encode_tuple(tuple, D_.size()), Dir::LEQ, thr) == Tri::False)
        return "R[" + D_.index().at(p.formula).key + " <= " + thr.str() + "] fails for entry " + std::to_string(i);
    }
    return {};
  }

  // Cauchy constraint between step n (a) and step n+1 (b).
  std::string cauchy(int n, const std::vector<int>& b, const std::vector<int>& a) const {
    const Rational thr = cauchy_threshold(n);
    for (std::size_t k = 0; k < a.size(); ++k)
      if (view_.query(dd_, static_cast<std::size_t>(b[k]) * D_.size() + a[k], Dir::LEQ, thr) == Tri::False)
        return "R[d <= " + thr.str() + "] fails on coordinate " + std::to_string(k);
    return {};
  }

 private:
  const DiscreteStructure& D_;
  const SequenceType& st_;
  ThresholdView view_;
  std::vector<EntryPlan> plans_;
  std::vector<std::vector<std::vector<int>>> chains_;
  int dd_ = -1;
};

}  // namespace

RealizationResult check_realizes_sequence(const DiscreteStructure& D, const std::vector<std::vector<int>>& candidates,
                                          const SequenceType& st) {
  RealizationResult res;
  if (candidates.size() != static_cast<std::size_t>(st.depth + 1)) {
    res.ok = false;
    res.violation = "expected " + std::to_string(st.depth + 1) + " candidate tuples";
    return res;
  }
  SequenceChecker chk(D, st);
  for (int n = 0; n <= st.depth; ++n) {
    if (candidates[n].size() != st.arity()) {
      res.ok = false;
      res.step = n;
      res.violation = "candidate arity mismatch";
      return res;
    }
    std::string why = chk.formulas_at(n, candidates[n]);
    if (why.empty() && n > 0) why = chk.cauchy(n - 1, candidates[n], candidates[n - 1]);
    if (!why.empty()) {
      res.ok = false;
      res.step = n;
      res.violation = why;
      return res;
    }
  }
  return res;
}

std::optional<std::vector<std::vector<int>>> find_sequence_realization(const DiscreteStructure& D,
                                                                       const SequenceType& st) {
  SequenceChecker chk(D, st);
  const int l = static_cast<int>(st.arity());
  const std::size_t T = tuple_count(D.size(), l);
  std::vector<std::vector<long>> parent(st.depth + 1, std::vector<long>(T, -2));  // -2: unreachable
  for (std::size_t t = 0; t < T; ++t)
    if (chk.formulas_at(0, decode_tuple(t, l, D.size())).empty()) parent[0][t] = -1;
  for (int n = 1; n <= st.depth; ++n)
    for (std::size_t t = 0; t < T; ++t) {
      auto b = decode_tuple(t, l, D.size());
      if (!chk.formulas_at(n, b).empty()) continue;
      for (std::size_t u = 0; u < T; ++u) {
        if (parent[n - 1][u] == -2) continue;
        if (chk.cauchy(n - 1, b, decode_tuple(u, l, D.size())).empty()) {
          parent[n][t] = static_cast<long>(u);
          break;
        }
      }
    }
  for (std::size_t t = 0; t < T; ++t) {
    if (parent[st.depth][t] == -2) continue;
    std::vector<std::vector<int>> chain(st.depth + 1);
    long cur = static_cast<long>(t);
    for (int n = st.depth; n >= 0; --n) {
      chain[n] = decode_tuple(static_cast<std::size_t>(cur), l, D.size());
      cur = parent[n][cur];
    }
    return chain;
  }
  return std::nullopt;
}

namespace {

Rational table_distance(const DiscreteStructure& D, int a, int b) {
  const int dd = D.index().dist_atom();
  const std::size_t t = static_cast<std::size_t>(a) * D.size() + b;
  if (auto v = ThresholdView(D).exact_value(dd, t)) return *v;
  return derived_value(D, dd, t).value;
}

}  // namespace

ContinuousTypeFragment limit_type(const SequenceType& st, const DiscreteStructure& D) {
  ContinuousTypeFragment r;
  r.vars = st.vars;
  for (const auto& e : st.index) {
    TypeCondition c;
    c.formula = e.formula;
    c.params = e.params;
    if (e.chain.size() < static_cast<std::size_t>(st.depth + 1)) throw UnresolvedChain("chain shorter than depth");
    std::vector<std::vector<int>> ids;
    for (const auto& step : e.chain) ids.push_back(element_ids(step, D.carrier.universe));
    for (std::size_t k = 0; k < e.params.size(); ++k) {
      int best = -1;
      Rational best_d;
      for (std::size_t x = 0; x < D.size(); ++x) {
        bool stays = true;
        for (int n = 1; n <= st.depth && stays; ++n)
          stays = table_distance(D, ids[n][k], static_cast<int>(x)) <= pow2_inv(n - 1);
        if (!stays) continue;
        Rational dx = table_distance(D, ids[st.depth][k], static_cast<int>(x));
        if (best < 0 || dx < best_d) {
          best = static_cast<int>(x);
          best_d = dx;
        }
      }
      if (best < 0) throw UnresolvedChain("chain for parameter " + e.params[k] + " has no limit at depth " +
                                          std::to_string(st.depth));
      c.values.push_back(D.carrier.universe[best]);
    }
    r.conditions.push_back(std::move(c));
  }
  return r;
}

SequenceType restrict_sequence_type(const SequenceType& st, const std::vector<std::size_t>& keep) {
  SequenceType out;
  out.vars = st.vars;
  out.depth = st.depth;
  for (std::size_t i : keep) {
    if (i >= st.index.size()) throw InputError("restriction index out of range");
    out.index.push_back(st.index[i]);
  }
  return out;
}

std::optional<std::pair<int, int>> infinitesimal_witness(const DiscreteStructure& D, int N0) {
  const int dd = D.index().dist_atom();
  ThresholdView view(D);
  const std::size_t n = D.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      bool close = true;
      for (int k = 1; k <= N0 && close; ++k) close = view.query(dd, a * n + b, Dir::LEQ, Rational(1, k)) != Tri::False;
      if (close) return std::make_pair(static_cast<int>(a), static_cast<int>(b));
    }
  return std::nullopt;
}

}  // namespace cdense

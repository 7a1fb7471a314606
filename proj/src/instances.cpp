#include <algorithm>
#include <functional>
#include <limits>
#include <map>

#include "cdense/discretize.hpp"
#include "cdense/kernels.hpp"

namespace cdense {

const char* scheme_name(Scheme s) {
  static const char* names[] = {"1a", "1b", "1c", "1d", "1e", "1f", "1g", "1h", "2a", "2b", "2c", "2d", "2e",
                                "2f", "2g", "2h", "2i", "2j", "2k", "3a", "3b", "3c", "4a", "4b", "T*"};
  return names[static_cast<std::size_t>(s)];
}

bool oracle_scheme(Scheme s) {
  switch (s) {
    case Scheme::S1f:
    case Scheme::S1g:
    case Scheme::S1h:
    case Scheme::S2g:
    case Scheme::S2h:
    case Scheme::S2i:
    case Scheme::S2j: return true;
    default: return false;
  }
}

std::array<std::uint64_t, kSchemeCount> InstanceSet::counts() const {
  std::array<std::uint64_t, kSchemeCount> c{};
  for (const auto& it : items) ++c[static_cast<std::size_t>(it.scheme)];
  return c;
}

namespace {

constexpr std::uint32_t kBelow = std::numeric_limits<std::uint32_t>::max() - 1;  // threshold < 0
constexpr std::uint32_t kAbove = std::numeric_limits<std::uint32_t>::max();      // threshold > 1
constexpr std::uint32_t kTrue = 0, kFalse = 1;

class Builder {
 public:
  explicit Builder(InstanceSet& s) : s_(s), P_(static_cast<std::uint32_t>(2 * s.grid_L)) {
    s_.nodes.push_back(Node{Op::True});
    s_.nodes.push_back(Node{Op::False});
  }

  std::uint32_t pos_code(long p) const {
    if (p < 0) return kBelow;
    if (p > static_cast<long>(P_)) return kAbove;
    return static_cast<std::uint32_t>(p);
  }

  /// Code for an arbitrary rational threshold; grid points map to positions.
  std::uint32_t rational_code(const Rational& r) {
    if (r < Rational(0)) return kBelow;
    if (r > Rational(1)) return kAbove;
    const long L = s_.grid_L;
    long lo = r.floor_mul(L), hi = r.ceil_mul(L);
    if (lo == hi) return static_cast<std::uint32_t>(2 * lo);
    auto it = interned_.find(r);
    if (it != interned_.end()) return it->second;
    std::uint32_t code = P_ + 1 + static_cast<std::uint32_t>(s_.extra.size());
    s_.extra.push_back(r);
    s_.extra_grid.emplace_back(static_cast<int>(lo), static_cast<int>(hi));
    interned_.emplace(r, code);
    return code;
  }

  std::uint32_t lit(int f, std::size_t t, Dir d, std::uint32_t code) {
    if (code == kBelow) return d == Dir::GEQ ? kTrue : kFalse;
    if (code == kAbove) return d == Dir::GEQ ? kFalse : kTrue;
    return push(Node{Op::Lit, d, static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(t), code});
  }
  std::uint32_t lit_pos(int f, std::size_t t, Dir d, long p) { return lit(f, t, d, pos_code(p)); }

  std::uint32_t neg(std::uint32_t a) {
    if (a == kTrue) return kFalse;
    if (a == kFalse) return kTrue;
    return push(Node{Op::Not, Dir::GEQ, a});
  }

  std::uint32_t conj(std::vector<std::uint32_t>& xs) { return nary(Op::And, xs); }
  std::uint32_t disj(std::vector<std::uint32_t>& xs) { return nary(Op::Or, xs); }
  std::uint32_t conj2(std::uint32_t a, std::uint32_t b) {
    tmp2_ = {a, b};
    return conj(tmp2_);
  }

  std::uint32_t implies(std::uint32_t a, std::uint32_t b) {
    if (a == kFalse || b == kTrue) return kTrue;
    if (a == kTrue) return b;
    if (b == kFalse) return neg(a);
    return push(Node{Op::Implies, Dir::GEQ, a, b});
  }

  std::uint32_t iff(std::uint32_t a, std::uint32_t b) {
    if (b == kTrue) return a;
    if (b == kFalse) return neg(a);
    if (a == kTrue) return b;
    if (a == kFalse) return neg(b);
    return push(Node{Op::Iff, Dir::GEQ, a, b});
  }

  std::uint32_t limit(std::uint32_t truncated, std::uint32_t exact) {
    return push(Node{Op::Limit, Dir::GEQ, truncated, exact});
  }

  void emit(Scheme s, bool truncated, std::uint32_t root) { s_.items.push_back({s, truncated, root}); }
  void skip(Scheme s, std::uint64_t count) { s_.skipped[static_cast<std::size_t>(s)] += count; }

 private:
  std::uint32_t push(const Node& nd) {
    s_.nodes.push_back(nd);
    return static_cast<std::uint32_t>(s_.nodes.size() - 1);
  }

  std::uint32_t nary(Op op, std::vector<std::uint32_t>& xs) {
    const std::uint32_t unit = op == Op::And ? kTrue : kFalse;
    const std::uint32_t zero = op == Op::And ? kFalse : kTrue;
    std::size_t w = 0;
    for (std::uint32_t x : xs) {
      if (x == zero) return zero;
      if (x != unit) xs[w++] = x;
    }
    xs.resize(w);
    if (xs.empty()) return unit;
    if (xs.size() == 1) return xs[0];
    std::uint32_t off = static_cast<std::uint32_t>(s_.kids.size());
    s_.kids.insert(s_.kids.end(), xs.begin(), xs.end());
    return push(Node{op, Dir::GEQ, off, static_cast<std::uint32_t>(xs.size())});
  }

  InstanceSet& s_;
  std::uint32_t P_;
  std::map<Rational, std::uint32_t> interned_;
  std::vector<std::uint32_t> tmp2_;
};

std::size_t child_tuple(const std::vector<int>& map, const int* slots, std::size_t n) {
  std::size_t idx = 0;
  for (int s : map) idx = idx * n + static_cast<std::size_t>(slots[s]);
  return idx;
}

// psi = phi[y := t] up to bound-variable correspondence.
struct Substitution {
  std::string var;
  Term term;
};

class Matcher {
 public:
  Matcher(const std::string& y) : y_(y) {}

  bool formulas(const Formula& a, const Formula& b) {
    if (a.kind != b.kind || a.kids.size() != b.kids.size() || a.terms.size() != b.terms.size()) return false;
    if (a.kind == FKind::Rel && a.name != b.name) return false;
    if (a.is_quantifier()) {
      if (a.name == y_) return false;  // y bound here: substitution does not reach the body
      env_.emplace_back(a.name, b.name);
      bool ok = formulas(a.kids[0], b.kids[0]);
      env_.pop_back();
      return ok;
    }
    for (std::size_t i = 0; i < a.kids.size(); ++i)
      if (!formulas(a.kids[i], b.kids[i])) return false;
    for (std::size_t i = 0; i < a.terms.size(); ++i)
      if (!terms(a.terms[i], b.terms[i])) return false;
    return true;
  }

  std::optional<Term> image;

 private:
  const std::string* bound_in_b(const std::string& a_name) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->first == a_name) return &it->second;
    return nullptr;
  }

  bool mentions_bound_b(const Term& t) const {
    for (const auto& v : term_vars(t))
      for (const auto& [x, bv] : env_)
        if (bv == v) return true;
    return false;
  }

  bool terms(const Term& a, const Term& b) {
    if (a.is_var()) {
      if (const std::string* bv = bound_in_b(a.name)) return b.is_var() && b.name == *bv;
      if (a.name == y_) {
        if (mentions_bound_b(b)) return false;
        if (!image) {
          image = b;
          return true;
        }
        return *image == b;
      }
      if (!b.is_var() || b.name != a.name) return false;
      for (const auto& [x, bv] : env_)
        if (bv == b.name) return false;
      return true;
    }
    if (b.is_var() || a.name != b.name || a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
      if (!terms(a.args[i], b.args[i])) return false;
    return true;
  }

  std::string y_;
  std::vector<std::pair<std::string, std::string>> env_;
};

std::optional<Substitution> match_substitution(const FormulaInfo& phi, const FormulaInfo& psi) {
  if (phi.size != psi.size || phi.kind != psi.kind || phi.key == psi.key) return std::nullopt;
  for (const auto& y : phi.vars) {
    Matcher m(y);
    if (!m.formulas(phi.formula, psi.formula) || !m.image) continue;
    if (m.image->is_var() && m.image->name == y) continue;
    // Every other free variable of phi must stay free in psi.
    return Substitution{y, *m.image};
  }
  return std::nullopt;
}

class Generator {
 public:
  Generator(const DiscreteSignatureFragment& sigf, const Carrier& carrier, InstanceSet& set)
      : idx_(*sigf.index), sig_(sigf.sig()), carrier_(carrier), set_(set), b_(set), L_(set.grid_L),
        N_(set.omega_N), n_(carrier.size()) {
    minus_.assign(static_cast<std::size_t>(L_ + 1), std::vector<std::uint32_t>(N_ + 1));
    plus_ = minus_;
    for (int i = 0; i <= L_; ++i)
      for (int k = 1; k <= N_; ++k) {
        minus_[i][k] = b_.rational_code(Rational(i, L_) - Rational(1, k));
        plus_[i][k] = b_.rational_code(Rational(i, L_) + Rational(1, k));
      }
  }

  void run() {
    order_schemes();
    ring_schemes();
    metric_schemes();
    continuity_schemes();
  }

 private:
  std::size_t T(int f) const { return tuple_count(n_, idx_.at(f).arity); }
  int F() const { return static_cast<int>(idx_.size()); }
  long g(int i) const { return 2L * i; }  // grid index -> position

  void order_schemes() {
    std::vector<std::uint32_t> xs;
    for (int f = 0; f < F(); ++f)
      for (std::size_t t = 0; t < T(f); ++t)
        for (int i = 0; i <= L_; ++i)
          b_.emit(Scheme::S1a, false,
                  b_.implies(b_.neg(b_.lit_pos(f, t, Dir::GEQ, g(i))), b_.lit_pos(f, t, Dir::LEQ, g(i))));
    for (int f = 0; f < F(); ++f)
      for (std::size_t t = 0; t < T(f); ++t)
        for (int i = 0; i <= L_; ++i)
          b_.emit(Scheme::S1b, false,
                  b_.implies(b_.neg(b_.lit_pos(f, t, Dir::LEQ, g(i))), b_.lit_pos(f, t, Dir::GEQ, g(i))));
    for (int f = 0; f < F(); ++f)
      for (std::size_t t = 0; t < T(f); ++t)
        for (int i = 0; i <= L_; ++i)
          for (int j = 0; j < i; ++j) {
            xs = {b_.neg(b_.lit_pos(f, t, Dir::GEQ, g(i))), b_.neg(b_.lit_pos(f, t, Dir::LEQ, g(j)))};
            b_.emit(Scheme::S1c, false, b_.disj(xs));
          }
    for (int f = 0; f < F(); ++f)
      for (std::size_t t = 0; t < T(f); ++t)
        for (int i = 0; i <= L_; ++i)
          for (int j = 0; j <= i; ++j) {
            std::uint32_t up = b_.implies(b_.lit_pos(f, t, Dir::LEQ, g(j)), b_.lit_pos(f, t, Dir::LEQ, g(i)));
            std::uint32_t down = b_.implies(b_.lit_pos(f, t, Dir::GEQ, g(i)), b_.lit_pos(f, t, Dir::GEQ, g(j)));
            b_.emit(Scheme::S1d, false, b_.conj2(up, down));
          }
    for (int f = 0; f < F(); ++f)
      for (std::size_t t = 0; t < T(f); ++t)
        for (int i = 0; i <= L_; ++i) {
          xs = {b_.lit_pos(f, t, Dir::GEQ, g(i)), b_.lit_pos(f, t, Dir::LEQ, g(i))};
          b_.emit(Scheme::S1e, false, b_.disj(xs));
        }
    scheme_1f();
    for (int f = 0; f < F(); ++f)
      for (std::size_t t = 0; t < T(f); ++t)
        for (int i = 0; i <= L_; ++i) {
          xs.clear();
          for (int k = 1; k <= N_; ++k) xs.push_back(b_.lit(f, t, Dir::GEQ, minus_[i][k]));
          if (i > 0) xs.push_back(b_.lit_pos(f, t, Dir::GEQ, g(i) - 1));
          std::uint32_t lim = b_.limit(b_.conj(xs), b_.lit_pos(f, t, Dir::GEQ, g(i)));
          b_.emit(Scheme::S1g, true, b_.implies(lim, b_.lit_pos(f, t, Dir::GEQ, g(i))));
        }
    for (int f = 0; f < F(); ++f)
      for (std::size_t t = 0; t < T(f); ++t)
        for (int i = 0; i <= L_; ++i) {
          xs.clear();
          for (int k = 1; k <= N_; ++k) xs.push_back(b_.lit(f, t, Dir::LEQ, plus_[i][k]));
          if (i < L_) xs.push_back(b_.lit_pos(f, t, Dir::LEQ, g(i) + 1));
          std::uint32_t lim = b_.limit(b_.conj(xs), b_.lit_pos(f, t, Dir::LEQ, g(i)));
          b_.emit(Scheme::S1h, true, b_.implies(lim, b_.lit_pos(f, t, Dir::LEQ, g(i))));
        }
  }

  // OR over pairs r >= phi >= s with |r - s| < 1/n; open grid cells stand in
  // for the rationals strictly between grid points.
  void scheme_1f() {
    const int P = 2 * L_ + 1;
    std::vector<std::uint32_t> pair(static_cast<std::size_t>(P) * P);
    std::vector<std::uint32_t> xs;
    for (int f = 0; f < F(); ++f)
      for (std::size_t t = 0; t < T(f); ++t) {
        std::vector<std::uint32_t> leq(P), geq(P);
        for (int p = 0; p < P; ++p) {
          leq[p] = b_.lit_pos(f, t, Dir::LEQ, p);
          geq[p] = b_.lit_pos(f, t, Dir::GEQ, p);
        }
        std::fill(pair.begin(), pair.end(), kFalse);
        auto pair_node = [&](int p, int q) {
          std::uint32_t& slot = pair[static_cast<std::size_t>(p) * P + q];
          if (slot == kFalse) slot = b_.conj2(leq[p], geq[q]);
          return slot;
        };
        std::uint32_t exact = b_.conj2(leq[2 * L_], geq[0]);
        for (int k = 1; k <= N_ + 1; ++k) {
          const bool tail = k == N_ + 1;
          xs.clear();
          for (int i = 0; i <= L_; ++i)
            for (int j = 0; j <= L_; ++j)
              if (tail ? i == j : std::abs(i - j) * k < L_) xs.push_back(pair_node(2 * i, 2 * j));
          for (int c = 0; c < L_; ++c) xs.push_back(pair_node(2 * c + 1, 2 * c + 1));
          b_.emit(Scheme::S1f, true, b_.limit(b_.disj(xs), exact));
        }
      }
  }

  void ring_schemes() {
    std::vector<std::uint32_t> xs, ys;
    for (int f = 0; f < F(); ++f)
      for (std::size_t t = 0; t < T(f); ++t)
        b_.emit(Scheme::S2a, false, b_.conj2(b_.lit_pos(f, t, Dir::GEQ, 0), b_.lit_pos(f, t, Dir::LEQ, g(L_))));

    const int zero = idx_.find_key("0"), one = idx_.find_key("1");
    const std::size_t T0 = tuple_count(n_, 0);
    if (zero < 0 || one < 0) {
      b_.skip(Scheme::S2b, static_cast<std::uint64_t>(L_) * T0);
    } else {
      for (std::size_t t = 0; t < T0; ++t)
        for (int i = 1; i <= L_; ++i)
          b_.emit(Scheme::S2b, false,
                  b_.conj2(b_.neg(b_.lit_pos(zero, t, Dir::GEQ, g(i))),
                           b_.neg(b_.lit_pos(one, t, Dir::LEQ, g(L_ - i)))));
    }

    int slots[64];
    auto each_tuple = [&](int f, auto&& fn) {
      const auto& fi = idx_.at(f);
      for (std::size_t t = 0; t < T(f); ++t) {
        decode_tuple(t, fi.arity, n_, slots);
        fn(t);
      }
    };
    auto kid = [&](int f, int c) { return child_tuple(idx_.at(f).child_map[c], slots, n_); };

    for (Scheme s : {Scheme::S2c, Scheme::S2d})
      for (int f = 0; f < F(); ++f) {
        if (idx_.at(f).kind != FKind::Half) continue;
        const int gch = idx_.at(f).child[0];
        const Dir d = s == Scheme::S2c ? Dir::GEQ : Dir::LEQ;
        each_tuple(f, [&](std::size_t t) {
          const std::size_t ct = kid(f, 0);
          for (int i = 0; i <= L_; ++i)
            b_.emit(s, false, b_.iff(b_.lit_pos(f, t, d, g(i)), b_.lit_pos(gch, ct, d, 4L * i)));
        });
      }

    for (Scheme s : {Scheme::S2e, Scheme::S2f})
      for (int f = 0; f < F(); ++f) {
        if (idx_.at(f).kind != FKind::Monus) continue;
        const int phi = idx_.at(f).child[0], psi = idx_.at(f).child[1];
        each_tuple(f, [&](std::size_t t) {
          const std::size_t tphi = kid(f, 0), tpsi = kid(f, 1);
          for (int i = (s == Scheme::S2e ? 1 : 0); i <= L_; ++i) {
            xs.clear();
            for (long p = 0; p <= 2L * L_; ++p) {
              if (s == Scheme::S2e)
                xs.push_back(b_.conj2(b_.lit_pos(psi, tpsi, Dir::LEQ, p), b_.lit_pos(phi, tphi, Dir::GEQ, g(i) + p)));
              else
                xs.push_back(b_.conj2(b_.lit_pos(psi, tpsi, Dir::GEQ, p), b_.lit_pos(phi, tphi, Dir::LEQ, g(i) + p)));
            }
            const Dir d = s == Scheme::S2e ? Dir::GEQ : Dir::LEQ;
            b_.emit(s, true, b_.iff(b_.lit_pos(f, t, d, g(i)), b_.disj(xs)));
          }
        });
      }

    auto over_universe = [&](int f, Dir d, std::uint32_t code) {
      ys.clear();
      const int body = idx_.at(f).child[0];
      for (std::size_t e = 0; e < n_; ++e) {
        slots[idx_.at(f).arity] = static_cast<int>(e);
        ys.push_back(b_.lit(body, kid(f, 0), d, code));
      }
    };

    for (int f = 0; f < F(); ++f) {
      if (idx_.at(f).kind != FKind::Sup) continue;
      each_tuple(f, [&](std::size_t t) {
        for (int i = 0; i <= L_; ++i) {
          over_universe(f, Dir::LEQ, static_cast<std::uint32_t>(g(i)));
          b_.emit(Scheme::S2g, false, b_.iff(b_.lit_pos(f, t, Dir::LEQ, g(i)), b_.conj(ys)));
        }
      });
    }
    for (int f = 0; f < F(); ++f) {
      if (idx_.at(f).kind != FKind::Sup) continue;
      each_tuple(f, [&](std::size_t t) {
        for (int i = 0; i <= L_; ++i) {
          xs.clear();
          for (int k = 1; k <= N_; ++k) {
            over_universe(f, Dir::GEQ, minus_[i][k]);
            xs.push_back(b_.disj(ys));
          }
          if (i > 0) {
            over_universe(f, Dir::GEQ, static_cast<std::uint32_t>(g(i) - 1));
            xs.push_back(b_.disj(ys));
          }
          std::uint32_t trunc = b_.conj(xs);
          over_universe(f, Dir::GEQ, static_cast<std::uint32_t>(g(i)));
          std::uint32_t exact = b_.disj(ys);
          b_.emit(Scheme::S2h, true, b_.iff(b_.lit_pos(f, t, Dir::GEQ, g(i)), b_.limit(trunc, exact)));
        }
      });
    }
    for (int f = 0; f < F(); ++f) {
      if (idx_.at(f).kind != FKind::Inf) continue;
      each_tuple(f, [&](std::size_t t) {
        for (int i = 0; i <= L_; ++i) {
          xs.clear();
          for (int k = 1; k <= N_; ++k) {
            over_universe(f, Dir::LEQ, plus_[i][k]);
            xs.push_back(b_.disj(ys));
          }
          if (i < L_) {
            over_universe(f, Dir::LEQ, static_cast<std::uint32_t>(g(i) + 1));
            xs.push_back(b_.disj(ys));
          }
          std::uint32_t trunc = b_.conj(xs);
          over_universe(f, Dir::LEQ, static_cast<std::uint32_t>(g(i)));
          std::uint32_t exact = b_.disj(ys);
          b_.emit(Scheme::S2i, true, b_.iff(b_.lit_pos(f, t, Dir::LEQ, g(i)), b_.limit(trunc, exact)));
        }
      });
    }
    for (int f = 0; f < F(); ++f) {
      if (idx_.at(f).kind != FKind::Inf) continue;
      each_tuple(f, [&](std::size_t t) {
        for (int i = 0; i <= L_; ++i) {
          over_universe(f, Dir::GEQ, static_cast<std::uint32_t>(g(i)));
          b_.emit(Scheme::S2j, false, b_.iff(b_.lit_pos(f, t, Dir::GEQ, g(i)), b_.conj(ys)));
        }
      });
    }
    scheme_2k();
  }

  void scheme_2k() {
    for (int phi = 0; phi < F(); ++phi)
      for (int psi = 0; psi < F(); ++psi) {
        auto sub = match_substitution(idx_.at(phi), idx_.at(psi));
        if (!sub) continue;
        const auto& pi = idx_.at(phi);
        const auto& si = idx_.at(psi);
        CompiledTerm term;
        {
          // Compile the image term against psi's tuple layout.
          std::vector<std::string> vars = si.vars;
          std::function<CompiledTerm(const Term&)> comp = [&](const Term& t) {
            CompiledTerm c;
            if (t.is_var()) {
              c.var_slot = static_cast<int>(std::find(vars.begin(), vars.end(), t.name) - vars.begin());
              return c;
            }
            c.func = sig_.function_index(t.name);
            for (const auto& a : t.args) c.args.push_back(comp(a));
            return c;
          };
          term = comp(sub->term);
        }
        std::vector<int> from(pi.arity);  // phi slot -> psi slot, or -1 for y
        for (int k = 0; k < pi.arity; ++k) {
          if (pi.vars[k] == sub->var) {
            from[k] = -1;
            continue;
          }
          from[k] = static_cast<int>(std::find(si.vars.begin(), si.vars.end(), pi.vars[k]) - si.vars.begin());
        }
        std::vector<int> sigma(si.arity + 1), target(pi.arity);
        for (std::size_t t = 0; t < T(psi); ++t) {
          decode_tuple(t, si.arity, n_, sigma.data());
          const int image = eval_compiled_term(term, sigma.data(), n_, carrier_.func_tables);
          for (int k = 0; k < pi.arity; ++k) target[k] = from[k] < 0 ? image : sigma[from[k]];
          const std::size_t tp = encode_tuple(target, n_);
          for (int i = 0; i <= L_; ++i)
            for (Dir d : {Dir::GEQ, Dir::LEQ})
              b_.emit(Scheme::S2k, false, b_.iff(b_.lit_pos(phi, tp, d, g(i)), b_.lit_pos(psi, t, d, g(i))));
        }
      }
  }

  std::size_t pair(std::size_t a, std::size_t c) const { return a * n_ + c; }

  void metric_schemes() {
    const int dd = idx_.dist_atom();
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = 0; y < n_; ++y)
        b_.emit(Scheme::S3a, false, b_.iff(b_.lit_pos(dd, pair(x, y), Dir::LEQ, 0), x == y ? kTrue : kFalse));
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = 0; y < n_; ++y)
        for (int i = 0; i <= L_; ++i)
          for (Dir d : {Dir::GEQ, Dir::LEQ})
            b_.emit(Scheme::S3b, false,
                    b_.iff(b_.lit_pos(dd, pair(x, y), d, g(i)), b_.lit_pos(dd, pair(y, x), d, g(i))));
    std::vector<std::uint32_t> xs;
    for (int i = 0; i <= L_; ++i)
      for (std::size_t x = 0; x < n_; ++x)
        for (std::size_t y = 0; y < n_; ++y)
          for (std::size_t z = 0; z < n_; ++z) {
            xs.clear();
            for (long p = 0; p <= g(i); ++p)
              xs.push_back(b_.conj2(b_.lit_pos(dd, pair(x, z), Dir::GEQ, p),
                                    b_.lit_pos(dd, pair(z, y), Dir::GEQ, g(i) - p)));
            b_.emit(Scheme::S3c, true, b_.implies(b_.lit_pos(dd, pair(x, y), Dir::GEQ, g(i)), b_.disj(xs)));
          }
  }

  // Tuples x, y of the given arity, visited as one combined index.
  template <typename Fn>
  void each_pair_of_tuples(int arity, Fn&& fn) {
    const std::size_t T = tuple_count(n_, arity);
    std::vector<int> x(arity), y(arity);
    for (std::size_t a = 0; a < T; ++a) {
      decode_tuple(a, arity, n_, x.data());
      for (std::size_t c = 0; c < T; ++c) {
        decode_tuple(c, arity, n_, y.data());
        fn(a, c, x, y);
      }
    }
  }

  int find_continuity_formula(const std::string& rel, int arity) const {
    for (int f = 0; f < F(); ++f) {
      const Formula& fm = idx_.at(f).formula;
      if (fm.kind != FKind::Monus) continue;
      const Formula& a = fm.kids[0];
      const Formula& b = fm.kids[1];
      if (a.kind != FKind::Rel || b.kind != FKind::Rel || a.name != rel || b.name != rel) continue;
      if (idx_.at(f).arity != 2 * arity) continue;
      bool all_vars = true;
      for (const auto& t : a.terms) all_vars = all_vars && t.is_var();
      for (const auto& t : b.terms) all_vars = all_vars && t.is_var();
      if (all_vars) return f;
    }
    return -1;
  }

  void continuity_schemes() {
    const int dd = idx_.dist_atom();
    std::vector<std::uint32_t> xs;
    for (std::size_t fn = 0; fn < sig_.functions.size(); ++fn) {
      const auto& decl = sig_.functions[fn];
      for (int i = 0; i <= L_; ++i) {
        const Rational delta = decl.modulus.delta_at(Rational(i, L_));
        for (int j = 0; j <= L_ && Rational(j, L_) < delta; ++j)
          each_pair_of_tuples(decl.arity, [&](std::size_t a, std::size_t c, const auto& x, const auto& y) {
            xs.clear();
            for (int k = 0; k < decl.arity; ++k) xs.push_back(b_.lit_pos(dd, pair(x[k], y[k]), Dir::LEQ, g(j)));
            const std::size_t fx = carrier_.func_tables[fn][a], fy = carrier_.func_tables[fn][c];
            b_.emit(Scheme::S4a, false, b_.implies(b_.conj(xs), b_.lit_pos(dd, pair(fx, fy), Dir::LEQ, g(i))));
          });
      }
    }
    for (const auto& decl : sig_.relations) {
      const int mu = find_continuity_formula(decl.name, decl.arity);
      const std::size_t T = tuple_count(n_, decl.arity);
      for (int i = 0; i <= L_; ++i) {
        const Rational delta = decl.modulus.delta_at(Rational(i, L_));
        for (int j = 0; j <= L_ && Rational(j, L_) < delta; ++j) {
          if (mu < 0) {
            b_.skip(Scheme::S4b, static_cast<std::uint64_t>(T * T));
            continue;
          }
          each_pair_of_tuples(decl.arity, [&](std::size_t a, std::size_t c, const auto& x, const auto& y) {
            xs.clear();
            for (int k = 0; k < decl.arity; ++k) xs.push_back(b_.lit_pos(dd, pair(x[k], y[k]), Dir::LEQ, g(j)));
            std::uint32_t prem = b_.conj(xs);
            std::uint32_t concl = b_.conj2(b_.lit_pos(mu, a * T + c, Dir::LEQ, g(i)),
                                           b_.lit_pos(mu, c * T + a, Dir::LEQ, g(i)));
            b_.emit(Scheme::S4b, false, b_.implies(prem, concl));
          });
        }
      }
    }
  }

  const FragmentIndex& idx_;
  const Signature& sig_;
  const Carrier& carrier_;
  InstanceSet& set_;
  Builder b_;
  int L_, N_;
  std::size_t n_;
  std::vector<std::vector<std::uint32_t>> minus_, plus_;
};

std::string tuple_text(const FragmentIndex& idx, int f, std::size_t t, const Carrier& carrier) {
  const int ar = idx.at(f).arity;
  auto x = decode_tuple(t, ar, carrier.size());
  std::string s = "(";
  for (int k = 0; k < ar; ++k) s += (k ? "," : "") + carrier.universe[x[k]];
  return s + ")";
}

void render(const InstanceSet& set, std::uint32_t id, const FragmentIndex& idx, const Carrier& carrier,
            std::string& out) {
  const Node& nd = set.nodes[id];
  auto join = [&](const char* sep) {
    out += '(';
    for (std::uint32_t k = 0; k < nd.b; ++k) {
      if (k) out += sep;
      render(set, set.kids[nd.a + k], idx, carrier, out);
    }
    out += ')';
  };
  switch (nd.op) {
    case Op::True: out += "true"; return;
    case Op::False: out += "false"; return;
    case Op::Lit: {
      const int L = set.grid_L;
      out += "R[" + idx.at(static_cast<int>(nd.a)).key + (nd.dir == Dir::GEQ ? " >= " : " <= ");
      const std::uint32_t P = static_cast<std::uint32_t>(2 * L);
      if (nd.c <= P && nd.c % 2 == 0)
        out += Rational(nd.c / 2, L).str();
      else if (nd.c <= P)
        out += "cell(" + Rational(nd.c / 2, L).str() + "," + Rational(nd.c / 2 + 1, L).str() + ")";
      else
        out += set.extra[nd.c - P - 1].str();
      out += "]" + tuple_text(idx, static_cast<int>(nd.a), nd.b, carrier);
      return;
    }
    case Op::Not:
      out += "!";
      render(set, nd.a, idx, carrier, out);
      return;
    case Op::And: join(" & "); return;
    case Op::Or: join(" | "); return;
    case Op::Implies:
    case Op::Iff:
      out += '(';
      render(set, nd.a, idx, carrier, out);
      out += nd.op == Op::Implies ? " -> " : " <-> ";
      render(set, nd.b, idx, carrier, out);
      out += ')';
      return;
    case Op::Limit:
      out += "limit[";
      render(set, nd.a, idx, carrier, out);
      out += " ; exact ";
      render(set, nd.b, idx, carrier, out);
      out += ']';
      return;
  }
}

}  // namespace

InstanceSet generate_tdense(const DiscreteSignatureFragment& sigf, const Carrier& carrier, int omega_N) {
  if (omega_N < 2) throw InputError("omega_N must be at least 2");
  if (sigf.index->dist_atom() < 0) throw InputError("fragment lacks a distance atom d(x, y)");
  InstanceSet set;
  set.grid_L = sigf.grid_L();
  set.omega_N = omega_N;
  Generator gen(sigf, carrier, set);
  gen.run();
  return set;
}

InstanceSet generate_tstar(const std::vector<Condition>& T, const DiscreteSignatureFragment& sigf,
                           const Carrier& carrier, int omega_N) {
  InstanceSet set = generate_tdense(sigf, carrier, omega_N);
  for (const auto& c : T) {
    if (!free_vars(c.formula).empty()) throw InputError("condition is not closed: " + print_formula(c.formula));
    const int f = sigf.index->find(c.formula);
    if (f < 0) throw InputError("condition formula missing from fragment: " + print_formula(c.formula));
    for (std::size_t t = 0; t < tuple_count(carrier.size(), 0); ++t) {
      Node nd{Op::Lit, Dir::LEQ, static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(t), 0};
      set.nodes.push_back(nd);
      set.items.push_back({Scheme::TStar, false, static_cast<std::uint32_t>(set.nodes.size() - 1)});
    }
  }
  return set;
}

void add_relativized(InstanceSet& set, const std::vector<Condition>& T, const DiscreteSignatureFragment& sigf,
                     const Carrier& carrier) {
  for (const auto& c : T) {
    Formula body = alpha_normalize(c.formula);
    while (body.kind == FKind::Sup) body = alpha_normalize(body.kids[0]);
    const int f = sigf.index->find(body);
    if (f < 0) throw InputError("relativized body missing from fragment: " + print_formula(body));
    const std::size_t TT = tuple_count(carrier.size(), sigf.index->at(f).arity);
    for (std::size_t t = 0; t < TT; ++t) {
      set.nodes.push_back(Node{Op::Lit, Dir::LEQ, static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(t), 0});
      set.items.push_back({Scheme::TStar, false, static_cast<std::uint32_t>(set.nodes.size() - 1)});
    }
  }
}

std::string render_instance(const InstanceSet& set, std::uint32_t root, const FragmentIndex& idx,
                            const Carrier& carrier) {
  std::string out;
  render(set, root, idx, carrier, out);
  return out;
}

bool VerdictReport::ok() const { return failures() == 0; }

std::uint64_t VerdictReport::failures() const {
  std::uint64_t f = 0;
  for (const auto& s : schemes) f += s.fail;
  return f;
}

VerdictReport check_tdense(const DiscreteStructure& D, const InstanceSet& set) {
  std::vector<Tri> verdicts = kernels::evaluate(D, set);
  VerdictReport rep;
  rep.schemes.resize(kSchemeCount);
  std::array<bool, kSchemeCount> truncated{};
  for (std::size_t s = 0; s < kSchemeCount; ++s) {
    rep.schemes[s].scheme = static_cast<Scheme>(s);
    rep.schemes[s].skip = set.skipped[s];
  }
  for (std::size_t i = 0; i < set.items.size(); ++i) {
    const auto& it = set.items[i];
    auto& v = rep.schemes[static_cast<std::size_t>(it.scheme)];
    truncated[static_cast<std::size_t>(it.scheme)] |= it.truncated;
    switch (verdicts[i]) {
      case Tri::True: ++v.pass; break;
      case Tri::Unknown:
        ++v.pass;
        ++v.undetermined;
        break;
      case Tri::False:
        ++v.fail;
        if (!v.witness) v.witness = render_instance(set, it.root, D.index(), D.carrier);
        break;
    }
  }
  for (std::size_t s = 0; s < kSchemeCount; ++s) {
    auto& v = rep.schemes[s];
    if (D.intensional() && oracle_scheme(v.scheme))
      v.mode = "oracle-exact";
    else
      v.mode = truncated[s] ? "truncated" : "exact";
  }
  return rep;
}

std::vector<Tri> evaluate_instances(const DiscreteStructure& D, const InstanceSet& set) {
  return kernels::evaluate(D, set);
}

}  // namespace cdense

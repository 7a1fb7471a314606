#include "cdense/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace cdense {

namespace {

// Uses raw engine output only; std distributions differ across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t below(std::uint64_t bound) { return eng_() % bound; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace

ContinuousStructure gen_random_structure(std::uint64_t seed, int n, int grid_L, const SigShape& shape) {
  if (n < 1) throw InputError("structure needs at least one element");
  if (grid_L < 2) throw InputError("grid_L must be at least 2");
  Rng rng(seed);
  ContinuousStructure M;
  for (int i = 0; i < shape.unary_rel; ++i) M.sig.relations.push_back({"P" + std::to_string(i), 1, {}});
  for (int i = 0; i < shape.binary_rel; ++i) M.sig.relations.push_back({"R" + std::to_string(i), 2, {}});
  for (int i = 0; i < shape.unary_fun; ++i) M.sig.functions.push_back({"F" + std::to_string(i), 1, {}});
  for (int i = 0; i < n; ++i) M.universe.push_back("e" + std::to_string(i));

  // Integer distances in units of 1/L, then shortest-path closure.
  std::vector<long> dist(static_cast<std::size_t>(n * n), 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) dist[i * n + j] = dist[j * n + i] = 1 + static_cast<long>(rng.below(grid_L));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dist[i * n + j] = std::min(dist[i * n + j], dist[i * n + k] + dist[k * n + j]);
  for (long v : dist) M.metric.push_back(Rational(v, grid_L));

  for (const auto& f : M.sig.functions) {
    std::vector<int> table(tuple_count(n, f.arity));
    for (int& v : table) v = static_cast<int>(rng.below(n));
    M.func_tables.push_back(std::move(table));
  }
  for (const auto& r : M.sig.relations) {
    std::vector<Rational> table;
    for (std::size_t t = 0; t < tuple_count(n, r.arity); ++t)
      table.push_back(Rational(static_cast<long>(rng.below(grid_L + 1)), grid_L));
    M.rel_tables.push_back(std::move(table));
  }
  for (std::size_t f = 0; f < M.sig.functions.size(); ++f)
    M.sig.functions[f].modulus = measured_modulus(M, true, static_cast<int>(f), grid_L);
  for (std::size_t r = 0; r < M.sig.relations.size(); ++r)
    M.sig.relations[r].modulus = measured_modulus(M, false, static_cast<int>(r), grid_L);
  return M;
}

std::vector<int> function_closure(const ContinuousStructure& M, const std::vector<int>& seed) {
  std::set<int> in(seed.begin(), seed.end());
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<int> cur(in.begin(), in.end());
    for (std::size_t f = 0; f < M.sig.functions.size(); ++f) {
      const int m = M.sig.functions[f].arity;
      const std::size_t T = tuple_count(cur.size(), m);
      for (std::size_t t = 0; t < T; ++t) {
        auto local = decode_tuple(t, m, cur.size());
        for (int& x : local) x = cur[x];
        grew |= in.insert(M.func_tables[f][encode_tuple(local, M.size())]).second;
      }
      if (m == 0 && cur.empty()) grew |= in.insert(M.func_tables[f][0]).second;
    }
  }
  return {in.begin(), in.end()};
}

ContinuousStructure gen_probability_algebra(const std::vector<Rational>& weights) {
  const int k = static_cast<int>(weights.size());
  if (k < 1 || k > 16) throw InputError("probability algebra needs 1..16 atoms");
  Rational total(0);
  for (const auto& w : weights) {
    if (w < Rational(0)) throw InputError("negative atom weight");
    total += w;
  }
  if (total != Rational(1)) throw InputError("atom weights must sum to 1");

  unsigned live = 0;
  mpz_class den = 1;
  for (int j = 0; j < k; ++j) {
    if (weights[j] > Rational(0)) live |= 1u << j;
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), weights[j].raw().get_den_mpz_t());
  }
  std::vector<unsigned> masks;
  for (unsigned m = 0; m < (1u << k); ++m)
    if ((m & ~live) == 0) masks.push_back(m);
  auto index_of = [&](unsigned m) {
    return static_cast<int>(std::lower_bound(masks.begin(), masks.end(), m & live) - masks.begin());
  };
  auto measure = [&](unsigned m) {
    Rational s(0);
    for (int j = 0; j < k; ++j)
      if (m & (1u << j)) s += weights[j];
    return s;
  };

  ContinuousStructure P;
  const long grid = 2 * den.get_si();
  auto lipschitz = [&](long num, long den_factor) {
    ModulusTable t;
    for (long i = 0; i <= grid; ++i) t.set(Rational(i, grid), Rational(i * num, grid * den_factor));
    return t;
  };
  P.sig.functions = {{"zero", 0, {}},
                     {"one", 0, {}},
                     {"comp", 1, lipschitz(1, 1)},
                     {"meet", 2, lipschitz(1, 2)},
                     {"join", 2, lipschitz(1, 2)}};
  P.sig.relations = {{"mu", 1, lipschitz(1, 1)}};
  for (unsigned m : masks) {
    std::string name = "b";
    for (int j = 0; j < k; ++j) name += (m & (1u << j)) ? '1' : '0';
    P.universe.push_back(name);
  }
  const std::size_t n = masks.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) P.metric.push_back(measure(masks[a] ^ masks[b]));
  P.func_tables.push_back({index_of(0)});
  P.func_tables.push_back({index_of(live)});
  std::vector<int> comp, meet, join;
  for (std::size_t a = 0; a < n; ++a) comp.push_back(index_of(~masks[a]));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      meet.push_back(index_of(masks[a] & masks[b]));
      join.push_back(index_of(masks[a] | masks[b]));
    }
  P.func_tables.push_back(comp);
  P.func_tables.push_back(meet);
  P.func_tables.push_back(join);
  std::vector<Rational> mu;
  for (unsigned m : masks) mu.push_back(measure(m));
  P.rel_tables.push_back(mu);
  return P;
}

std::vector<Condition> probability_algebra_conditions(const Signature& sig) {
  static const char* texts[] = {
      "sup x. d(meet(x, x), x)",
      "sup x. d(join(x, x), x)",
      "sup x. sup y. d(meet(x, y), meet(y, x))",
      "sup x. sup y. d(join(x, y), join(y, x))",
      "sup x. sup y. sup z. d(meet(x, meet(y, z)), meet(meet(x, y), z))",
      "sup x. sup y. sup z. d(join(x, join(y, z)), join(join(x, y), z))",
      "sup x. sup y. d(meet(x, join(x, y)), x)",
      "sup x. sup y. d(join(x, meet(x, y)), x)",
      "sup x. sup y. sup z. d(meet(x, join(y, z)), join(meet(x, y), meet(x, z)))",
      "sup x. d(comp(comp(x)), x)",
      "sup x. d(meet(x, comp(x)), zero)",
      "sup x. d(join(x, comp(x)), one)",
      "sup x. sup y. d(comp(meet(x, y)), join(comp(x), comp(y)))",
      "mu(zero)",
      "monus(1, mu(one))",
      "sup x. monus(mu(x), d(x, zero))",
      "sup x. monus(d(x, zero), mu(x))",
      "sup x. sup y. monus(d(x, y), monus(mu(join(x, y)), mu(meet(x, y))))",
      "sup x. sup y. monus(monus(mu(join(x, y)), mu(meet(x, y))), d(x, y))",
  };
  std::vector<Condition> out;
  for (const char* t : texts) out.push_back({parse_formula(t, sig)});
  return out;
}

bool pra_precedes(const ContinuousStructure& P, int x, int y) {
  const int meet = P.sig.function_index("meet");
  const int mu = P.sig.relation_index("mu");
  if (meet < 0 || mu < 0) throw InputError("not a probability algebra signature");
  const auto& m = P.rel_tables[mu];
  const int xy = P.func_tables[meet][static_cast<std::size_t>(x) * P.size() + y];
  return monus(m[x], m[xy]) == Rational(0);
}

std::vector<int> extract_order_chain(const ContinuousStructure& P) {
  const int zero = P.sig.function_index("zero");
  const int mu = P.sig.relation_index("mu");
  if (zero < 0 || mu < 0) throw InputError("not a probability algebra signature");
  std::vector<int> chain{P.func_tables[zero][0]};
  for (;;) {
    const int cur = chain.back();
    int next = -1;
    for (std::size_t y = 0; y < P.size(); ++y) {
      const int yi = static_cast<int>(y);
      if (!pra_precedes(P, cur, yi) || pra_precedes(P, yi, cur)) continue;
      if (next < 0 || P.rel_tables[mu][yi] < P.rel_tables[mu][next]) next = yi;
    }
    if (next < 0) return chain;
    chain.push_back(next);
  }
}

DyadicRelation parse_dyadic_relation(const std::string& name) {
  if (name == "id") return DyadicRelation::Id;
  if (name == "flip") return DyadicRelation::Flip;
  if (name == "half") return DyadicRelation::Half;
  if (name == "tent") return DyadicRelation::Tent;
  throw InputError("unknown dyadic relation \"" + name + "\" (id, flip, half, tent)");
}

ContinuousStructure dyadic_level(int k, int K, DyadicRelation rel) {
  if (K < 1 || k < 0 || k > K || K > 20) throw InputError("dyadic levels need 0 <= k <= K, 1 <= K <= 20");
  const long top = 1L << K, step = 1L << (K - k);
  ContinuousStructure M;
  ModulusTable lip;
  for (long i = 0; i <= top; ++i) lip.set(Rational(i, top), Rational(i, top));
  M.sig.relations.push_back({"P", 1, lip});
  std::vector<Rational> xs;
  for (long i = 0; i <= top; i += step) xs.push_back(Rational(i, top));
  for (const auto& x : xs) M.universe.push_back(x.str());
  for (const auto& x : xs)
    for (const auto& y : xs) M.metric.push_back(x > y ? x - y : y - x);
  std::vector<Rational> p;
  for (const auto& x : xs) {
    switch (rel) {
      case DyadicRelation::Id: p.push_back(x); break;
      case DyadicRelation::Flip: p.push_back(Rational(1) - x); break;
      case DyadicRelation::Half: p.push_back(x * Rational(1, 2)); break;
      case DyadicRelation::Tent: p.push_back(rmin(x, Rational(1) - x)); break;
    }
  }
  M.rel_tables.push_back(p);
  return M;
}

LevelFamily gen_dyadic_family(int K, DyadicRelation rel, int depth, int omega_N) {
  const ContinuousStructure top = dyadic_level(K, K, rel);
  const DiscreteSignatureFragment sigf =
      build_signature_fragment(top.sig, depth_closure(top.sig, depth, 1 << K, omega_N));
  LevelFamily fam;
  for (int k = 0; k <= K; ++k) fam.levels.push_back(materialize(encode(dyadic_level(k, K, rel), sigf)));
  return fam;
}

}  // namespace cdense

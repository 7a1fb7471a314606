#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cdense/densify.hpp"

namespace cdense {

struct SigShape {
  int unary_rel = 1;
  int binary_rel = 0;
  int unary_fun = 0;
};

/// Grid-aligned random structure: elements e0.., relations P0.. (unary) and
/// R0.. (binary), functions F0.. (unary). Moduli are the measured optimum.
ContinuousStructure gen_random_structure(std::uint64_t seed, int n, int grid_L, const SigShape& shape);

/// Smallest superset of seed closed under every function table.
std::vector<int> function_closure(const ContinuousStructure& M, const std::vector<int>& seed);

/// Boolean algebra of subsets of k weighted atoms: constants zero, one;
/// functions comp, meet, join; relation mu; d(x, y) = mu(x xor y).
/// Sets that differ only on null atoms are merged.
ContinuousStructure gen_probability_algebra(const std::vector<Rational>& weights);
/// Boolean-algebra and measure identities expressible as closed conditions.
std::vector<Condition> probability_algebra_conditions(const Signature& sig);
/// Greedy maximal chain from zero under x < y iff mu(x) monus mu(meet(x, y)) = 0.
std::vector<int> extract_order_chain(const ContinuousStructure& P);
bool pra_precedes(const ContinuousStructure& P, int x, int y);

enum class DyadicRelation { Id, Flip, Half, Tent };
DyadicRelation parse_dyadic_relation(const std::string& name);

/// Dyadics i/2^k in [0,1] with d = |x - y| and a 1-Lipschitz unary P; values
/// live on the grid 1/2^K.
ContinuousStructure dyadic_level(int k, int K, DyadicRelation rel);
/// Levels 0..K encoded extensionally over one shared depth closure at grid 2^K.
LevelFamily gen_dyadic_family(int K, DyadicRelation rel, int depth = 1, int omega_N = 2);

}  // namespace cdense

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cdense/discretize.hpp"

// Data-parallel kernels (OpenMP) next to their serial references. The
// serial versions are the specification the tests compare against.
namespace cdense::kernels {

int max_threads();

/// Bottom-up over the fragment, parallel over tuples.
ValueTables value_tables(const ContinuousStructure& M, const FragmentIndex& idx);
/// One recursive eval() per formula and tuple.
ValueTables value_tables_serial(const ContinuousStructure& M, const FragmentIndex& idx);

/// Threshold bits from floor/ceil integers, parallel over formulas.
TruthTables materialize_tables(const ValueTables& v, const FragmentIndex& idx);
/// Direct rational comparison per threshold.
TruthTables materialize_tables_serial(const ValueTables& v, const FragmentIndex& idx);

std::vector<Tri> evaluate(const DiscreteStructure& D, const InstanceSet& set);
std::vector<Tri> evaluate_serial(const DiscreteStructure& D, const InstanceSet& set);
/// Verdict of a single instance body.
Tri evaluate_root(const DiscreteStructure& D, const InstanceSet& set, std::uint32_t root);

/// Threshold bits read by an instance on extensional input, as
/// (formula, TruthTables offset) pairs, without duplicates.
std::vector<std::pair<int, std::size_t>> instance_bits(const InstanceSet& set, std::uint32_t root);

}  // namespace cdense::kernels

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "cdense/corpus.hpp"
#include "cdense/kernels.hpp"

using namespace cdense;

namespace {

struct Fixture {
  ContinuousStructure M;
  DiscreteSignatureFragment sigf;
  DiscreteStructure D;
  InstanceSet set;

  explicit Fixture(int n) {
    SigShape shape;
    shape.binary_rel = 1;
    M = gen_random_structure(7, n, 24, shape);
    sigf = build_signature_fragment(M.sig, depth_closure(M.sig, 2, 24, 16));
    D = encode(M, sigf);
    set = generate_tdense(sigf, D.carrier, 16);
  }
};

const Fixture& fixture(int n) {
  static std::map<int, std::unique_ptr<Fixture>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Fixture>(n);
  return *slot;
}

void BM_ValueTables(benchmark::State& st) {
  const auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::value_tables(f.M, *f.sigf.index));
}

void BM_ValueTablesSerial(benchmark::State& st) {
  const auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::value_tables_serial(f.M, *f.sigf.index));
}

void BM_Materialize(benchmark::State& st) {
  const auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::materialize_tables(*f.D.oracle, *f.sigf.index));
}

void BM_MaterializeSerial(benchmark::State& st) {
  const auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::materialize_tables_serial(*f.D.oracle, *f.sigf.index));
}

void BM_Evaluate(benchmark::State& st) {
  const auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::evaluate(f.D, f.set));
}

void BM_EvaluateSerial(benchmark::State& st) {
  const auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::evaluate_serial(f.D, f.set));
}

}  // namespace

BENCHMARK(BM_ValueTables)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ValueTablesSerial)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Materialize)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaterializeSerial)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluate)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateSerial)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

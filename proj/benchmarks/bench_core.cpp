#include <benchmark/benchmark.h>

#include "vnlab/algebra.hpp"
#include "vnlab/entanglement.hpp"
#include "vnlab/entropy.hpp"
#include "vnlab/harness.hpp"
#include "vnlab/modular.hpp"
#include "vnlab/nuclearity.hpp"
#include "vnlab/random.hpp"
#include "vnlab/splitinc.hpp"

using namespace vnlab;

static void BM_RelativeEntropy(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto method = state.range(1) == 0 ? RelEntMethod::Umegaki : RelEntMethod::Modular;
  Rng rng(1);
  auto m = make_algebra(full_matrix_algebra(d));
  const Functional phi(m, rng.density(d)), psi(m, rng.density(d));
  for (auto _ : state) benchmark::DoNotOptimize(relative_entropy(phi, psi, method));
}
BENCHMARK(BM_RelativeEntropy)->ArgsProduct({{2, 4, 8}, {0, 1}});

static void BM_CommutantBasis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  const auto m = canonicalize(2 * n, {Block{n, 2}}, rng.unitary(2 * n));
  const auto basis = m.basis();
  for (auto _ : state) benchmark::DoNotOptimize(commutant_basis(basis));
}
BENCHMARK(BM_CommutantBasis)->Arg(2)->Arg(4)->Arg(8);

static void BM_GnsStandardForm(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(3);
  auto m = make_algebra(full_matrix_algebra(d));
  const Functional phi(m, rng.density(d));
  for (auto _ : state) benchmark::DoNotOptimize(gns(m, phi));
}
BENCHMARK(BM_GnsStandardForm)->Arg(2)->Arg(4);

static void BM_RelativeEntanglementUpper(benchmark::State& state) {
  Rng rng(4);
  const auto sys = BipartiteSystem::matrices(2, 2);
  const Functional omega = sys.state(rng.density(4));
  EROptions opts;
  opts.restarts = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(relative_entanglement_upper(sys, omega, opts));
}
BENCHMARK(BM_RelativeEntanglementUpper)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_PnormUpper(benchmark::State& state) {
  Rng rng(5);
  const int db = static_cast<int>(state.range(0));
  const SplitPair sp(2, db, rng.unit_vector(4 * db * db));
  const auto xa = xi_map(sp, Side::A);
  for (auto _ : state) benchmark::DoNotOptimize(pnorm_upper(xa, 0.5));
}
BENCHMARK(BM_PnormUpper)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_CanonicalFactor(benchmark::State& state) {
  Rng rng(6);
  const SplitPair sp(2, 2, rng.unit_vector(16));
  for (auto _ : state) {
    const auto impl = standard_implementation(sp);
    benchmark::DoNotOptimize(canonical_factor(sp, impl));
  }
}
BENCHMARK(BM_CanonicalFactor)->Unit(benchmark::kMillisecond);

static void BM_SuiteTrial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_suite("entropy", std::nullopt, 1, 1));
}
BENCHMARK(BM_SuiteTrial)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

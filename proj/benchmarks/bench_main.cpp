#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "permqfi/basis.hpp"
#include "permqfi/fisher.hpp"
#include "permqfi/operators.hpp"
#include "permqfi/oracle.hpp"
#include "permqfi/probes.hpp"

using namespace permqfi;

namespace {

SimParams lossy(int n) {
  SimParams p;
  p.num_qubits = n;
  p.kappa = 0.2;
  p.gamma = 0.6;
  return p;
}

// state with every support component populated, so nothing is trivially zero
DensityState mixed_on(const ProbeSpec& probe, int n) {
  DensityState rho = make_probe(probe, n);
  const SuperOp rhs = assemble_rhs(lossy(n), rho.shared_support());
  DensityState d = rhs.apply(rho);
  for (int i = 0; i < 3; ++i) {
    rho.values() += 0.05 * d.values();
    d = rhs.apply(rho);
  }
  return rho;
}

}  // namespace

static void BM_BuildLayout(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_layout(n));
}
BENCHMARK(BM_BuildLayout)->Arg(8)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

static void BM_AssembleRhs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto support = make_probe(ProbeSpec::x_polarized(), n).shared_support();
  for (auto _ : state) benchmark::DoNotOptimize(assemble_rhs(lossy(n), support));
  state.counters["components"] = static_cast<double>(support->size());
}
BENCHMARK(BM_AssembleRhs)->Arg(4)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_ApplyRhs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DensityState rho = make_probe(ProbeSpec::x_polarized(), n);
  const SuperOp rhs = assemble_rhs(lossy(n), rho.shared_support());
  Eigen::VectorXcd out(rho.values().size());
  for (auto _ : state) {
    rhs.apply(rho.values(), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["nnz"] = static_cast<double>(rhs.nonzeros());
}
BENCHMARK(BM_ApplyRhs)->Arg(4)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

static void BM_ApplyRhsDicke1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DensityState rho = make_probe(ProbeSpec::dicke(1), n);
  const SuperOp rhs = assemble_rhs(lossy(n), rho.shared_support());
  Eigen::VectorXcd out(rho.values().size());
  for (auto _ : state) {
    rhs.apply(rho.values(), out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ApplyRhsDicke1)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

static void BM_QfiAt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DensityState plus = mixed_on(ProbeSpec::x_polarized(), n);
  DensityState minus = plus;
  minus.values() *= 1.0 + 1e-4;
  const QfiConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(qfi_at(plus, minus, cfg));
}
BENCHMARK(BM_QfiAt)->Arg(4)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_OracleApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const oracle::FullRhs rhs(lossy(n));
  const Eigen::MatrixXcd rho = oracle::expand(mixed_on(ProbeSpec::x_polarized(), n)).rho;
  for (auto _ : state) benchmark::DoNotOptimize(rhs.apply(rho));
}
BENCHMARK(BM_OracleApply)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

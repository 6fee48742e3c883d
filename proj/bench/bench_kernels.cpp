// Serial reference kernels against their OpenMP counterparts.
//
//   ./build/kdsim_bench --benchmark_filter=Dft
//   OMP_NUM_THREADS=4 ./build/kdsim_bench

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "kdsim/fit.hpp"
#include "kdsim/kernels.hpp"
#include "kdsim/tdse.hpp"

using namespace kdsim;
using kernels::cplx;

namespace {

std::vector<cplx> random_state(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

std::vector<double> profile(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = std::cos(2.0 * 0.0245 * static_cast<double>(j));
  return v;
}

template <auto Kernel>
void BM_ApplyPhase(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto psi = random_state(n);
  const auto phase = profile(n);
  for (auto _ : state) {
    Kernel(psi, phase, 1e-3);
    benchmark::DoNotOptimize(psi.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_NormSquared(benchmark::State& state) {
  const auto psi = random_state(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(psi));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_Dft(benchmark::State& state) {
  const auto samples = random_state(static_cast<std::size_t>(state.range(0)));
  std::vector<int> freqs;
  for (int m = -40; m <= 40; ++m) freqs.push_back(m);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(samples, freqs));
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<long>(freqs.size()));
}

template <auto Kernel>
void BM_ChiSquareScan(benchmark::State& state) {
  const ObservedPattern obs = synthesize_gaussian(2.0, 0.8, {0, 1, 2, 3, 4, 5, 6}, GaussianNoise{}, 3);
  std::vector<double> rs(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < rs.size(); ++i) rs[i] = 2.0 * static_cast<double>(i) / static_cast<double>(rs.size() - 1);
  const auto f = [&obs](double r) { return chi_square(obs, r); };
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(rs, f));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Propagate(benchmark::State& state) {
  const Grid1D grid{static_cast<int>(state.range(0)), 8};
  const WaveState psi = init_plane_wave(grid, 0);
  DimensionlessSetup setup;
  setup.u0 = 1000.0;
  setup.alpha = 2.0;
  setup.tau = 0.004;
  const PotentialSpec spec = build_potential(MomentSet::dipole_quadrupole(0.2, 0.1));
  const PropagationConfig config = make_propagation_config(setup, spec);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(psi, spec, setup, config));
  state.SetItemsProcessed(state.iterations() * config.n_steps);
}

}  // namespace

BENCHMARK(BM_ApplyPhase<kernels::serial::apply_phase>)->Name("ApplyPhase/serial")->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_ApplyPhase<kernels::omp::apply_phase>)->Name("ApplyPhase/omp")->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_NormSquared<kernels::serial::norm_squared>)->Name("NormSquared/serial")->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_NormSquared<kernels::omp::norm_squared>)->Name("NormSquared/omp")->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_Dft<kernels::serial::dft_at>)->Name("Dft/serial")->Arg(256)->Arg(4096);
BENCHMARK(BM_Dft<kernels::omp::dft_at>)->Name("Dft/omp")->Arg(256)->Arg(4096);
BENCHMARK(BM_ChiSquareScan<kernels::serial::evaluate>)->Name("ChiSquareScan/serial")->Arg(401)->Arg(4001);
BENCHMARK(BM_ChiSquareScan<kernels::omp::evaluate>)->Name("ChiSquareScan/omp")->Arg(401)->Arg(4001);
BENCHMARK(BM_Propagate)->Name("Propagate")->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

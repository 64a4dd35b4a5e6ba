// Serial reference kernels against their OpenMP counterparts, plus one full
// forward step. Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "tdks/kernels.hpp"
#include "tdks/ground_state.hpp"
#include "tdks/propagation.hpp"

namespace {

using tdks::cplx;
namespace serial = tdks::kernels::serial;
namespace omp = tdks::kernels::omp;

std::vector<cplx> wave(std::size_t n) {
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = {std::sin(0.1 * i), std::cos(0.07 * i)};
  return v;
}

std::vector<double> ramp(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 1e-3 * i;
  return v;
}

template <auto Kernel>
void BM_phase(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto v = ramp(n);
  std::vector<cplx> phase(n);
  for (auto _ : state) {
    Kernel(v, 0.01, phase);
    benchmark::DoNotOptimize(phase.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

template <auto Kernel>
void BM_multiply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = wave(n);
  auto b = wave(n);
  for (auto _ : state) {
    Kernel(a, b);
    benchmark::DoNotOptimize(b.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

template <auto Kernel>
void BM_density(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto psi = wave(n);
  std::vector<double> rho(n);
  for (auto _ : state) {
    Kernel(psi, 1.0, rho);
    benchmark::DoNotOptimize(rho.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

template <auto Kernel>
void BM_weighted_dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto w = ramp(n);
  auto a = wave(n);
  auto b = wave(n);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(w, a, b));
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_forward_step(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  auto grid = tdks::make_grid(2, 7.0, m);
  auto model = tdks::make_model(grid, tdks::Confinement::parse("harmonic50"),
                                tdks::ControlShape::parse("quadratic"));
  auto psi = tdks::coherent_states(grid, 50.0, {{0.5, 0.0}, {-0.5, 0.25}});
  for (auto _ : state) {
    psi = tdks::strang_step_forward(psi, 1.0, 1.0, 1e-3, model);
    benchmark::DoNotOptimize(psi.data().data());
  }
}

}  // namespace

#define SIZES ->Arg(64 * 64)->Arg(128 * 128)->Arg(256 * 256)

BENCHMARK(BM_phase<serial::fill_phase>) SIZES;
BENCHMARK(BM_phase<omp::fill_phase>) SIZES;
BENCHMARK(BM_multiply<serial::multiply>) SIZES;
BENCHMARK(BM_multiply<omp::multiply>) SIZES;
BENCHMARK(BM_density<serial::add_density>) SIZES;
BENCHMARK(BM_density<omp::add_density>) SIZES;
BENCHMARK(BM_weighted_dot<serial::weighted_real_dot>) SIZES;
BENCHMARK(BM_weighted_dot<omp::weighted_real_dot>) SIZES;
BENCHMARK(BM_forward_step)->Arg(64)->Arg(128);

BENCHMARK_MAIN();

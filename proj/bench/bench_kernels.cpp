// Serial reference vs OpenMP for the batch kernels.
// Run with OMP_NUM_THREADS=<n>; the Arg is the batch size.

#include "orbitlab/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace orbitlab;

namespace {

std::vector<State> scalar_points(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<State> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(State::scalar(u(rng)));
  return pts;
}

std::vector<std::pair<State, State>> gd_pairs(const MapInstance& map, std::size_t n) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<std::pair<State, State>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd a(2), b(2);
    a << u(rng), u(rng);
    b << u(rng), u(rng);
    pairs.emplace_back(map.make_state(a), map.make_state(b));
  }
  return pairs;
}

void descent(benchmark::State& st, kernels::Backend backend) {
  const auto map = MapInstance::gd(catalog::double_well(1.5), 0.1);
  const auto pts = scalar_points(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::descent_values(map, pts, backend));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void roundtrip(benchmark::State& st, kernels::Backend backend) {
  const auto map = MapInstance::gd(catalog::double_well(1.5), 0.1);
  const auto pts = scalar_points(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::roundtrip_errors(map, pts, {}, backend));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void scan(benchmark::State& st, kernels::Backend backend) {
  const auto map = MapInstance::gd(catalog::quadratic(2), 0.5);
  const auto pairs = gd_pairs(map, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::scan_pairs(map, pairs, 200, {}, nullptr, backend));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void level_curve(benchmark::State& st, kernels::Backend backend) {
  for (auto _ : st)
    benchmark::DoNotOptimize(kernels::level_curve(0.1, 0.2, 1.0, 31375.0, 700.0,
                                                  static_cast<std::size_t>(st.range(0)), backend));
}

}  // namespace

BENCHMARK_CAPTURE(descent, serial, kernels::Backend::serial)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK_CAPTURE(descent, openmp, kernels::Backend::openmp)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK_CAPTURE(roundtrip, serial, kernels::Backend::serial)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK_CAPTURE(roundtrip, openmp, kernels::Backend::openmp)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK_CAPTURE(scan, serial, kernels::Backend::serial)->Arg(64)->Arg(1024);
BENCHMARK_CAPTURE(scan, openmp, kernels::Backend::openmp)->Arg(64)->Arg(1024);
BENCHMARK_CAPTURE(level_curve, serial, kernels::Backend::serial)->Arg(2001)->Arg(20001);
BENCHMARK_CAPTURE(level_curve, openmp, kernels::Backend::openmp)->Arg(2001)->Arg(20001);

BENCHMARK_MAIN();

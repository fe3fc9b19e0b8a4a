// Serial reference vs OpenMP kernels. Arg 0 selects the flavour.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rlab/kernels.hpp"

namespace k = rlab::kernels;

namespace {

std::vector<k::cplx> random_field(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d;
  std::vector<k::cplx> v(n);
  for (auto& z : v) z = {d(gen), d(gen)};
  return v;
}

std::vector<double> random_reals(std::size_t n, unsigned seed, double lo, double hi) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

k::Exec exec_of(const benchmark::State& s) { return s.range(0) ? k::Exec::parallel : k::Exec::serial; }

void set_label(benchmark::State& s) { s.SetLabel(s.range(0) ? "parallel" : "serial"); }

void BM_WeightedMass(benchmark::State& s) {
  const std::size_t n = s.range(1);
  auto v = random_field(n, 1);
  auto w = random_reals(n, 2, 0.0, 1.0);
  for (auto _ : s) benchmark::DoNotOptimize(k::weighted_mass(v, w, exec_of(s)));
  s.SetItemsProcessed(s.iterations() * n);
  set_label(s);
}

void BM_PowerSum(benchmark::State& s) {
  const std::size_t n = s.range(1);
  auto v = random_field(n, 3);
  for (auto _ : s) benchmark::DoNotOptimize(k::power_sum(v, 1.5, {}, exec_of(s)));
  s.SetItemsProcessed(s.iterations() * n);
  set_label(s);
}

void BM_ProductPowerSum(benchmark::State& s) {
  const std::size_t n = s.range(1);
  auto a = random_field(n, 4), b = random_field(n, 5);
  std::vector<std::uint8_t> mask(n);
  for (std::size_t i = 0; i < n; ++i) mask[i] = i % 3 != 0;
  for (auto _ : s) benchmark::DoNotOptimize(k::product_power_sum(a, b, 1.5, mask, exec_of(s)));
  s.SetItemsProcessed(s.iterations() * n);
  set_label(s);
}

void BM_OscillatorySum(benchmark::State& s) {
  const int m = 2;
  const std::size_t K = s.range(1), J = 256;
  auto xi = random_reals(K * m, 6, -1.0, 1.0);
  std::vector<double> phi(K);
  for (std::size_t i = 0; i < K; ++i) phi[i] = 0.5 * (xi[2 * i] * xi[2 * i] + xi[2 * i + 1] * xi[2 * i + 1]);
  auto w = random_field(K, 7);
  auto x = random_reals(J * (m + 1), 8, -50.0, 50.0);
  for (auto _ : s) benchmark::DoNotOptimize(k::oscillatory_sum(xi, phi, w, m, x, exec_of(s)));
  s.SetItemsProcessed(s.iterations() * K * J);
  set_label(s);
}

}  // namespace

BENCHMARK(BM_WeightedMass)->ArgsProduct({{0, 1}, {1 << 16, 1 << 20}});
BENCHMARK(BM_PowerSum)->ArgsProduct({{0, 1}, {1 << 16, 1 << 20}});
BENCHMARK(BM_ProductPowerSum)->ArgsProduct({{0, 1}, {1 << 16, 1 << 20}});
BENCHMARK(BM_OscillatorySum)->ArgsProduct({{0, 1}, {1 << 10, 1 << 13}});

BENCHMARK_MAIN();

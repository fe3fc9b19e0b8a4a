#include <gtest/gtest.h>

#include <cmath>

#include <omp.h>

#include "rlab/kernels.hpp"
#include "rlab/random.hpp"

using namespace rlab;
using namespace rlab::kernels;

namespace {

std::vector<cplx> random_values(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(gaussian(rng), gaussian(rng));
  return v;
}

}  // namespace

TEST(Kernels, SerialAndParallelReductionsAgree) {
  for (std::size_t n : {std::size_t{1}, std::size_t{4095}, std::size_t{4096}, std::size_t{100003}}) {
    auto a = random_values(n, 1 + n), b = random_values(n, 2 + n);
    std::vector<double> w(n);
    std::vector<std::uint8_t> mask(n);
    for (std::size_t k = 0; k < n; ++k) {
      w[k] = 1.0 + std::sin(0.1 * k);
      mask[k] = k % 3 != 0;
    }
    auto close = [](double x, double y) { EXPECT_NEAR(x, y, 1e-12 * std::abs(y)); };
    close(weighted_mass(a, w, Exec::serial), weighted_mass(a, w, Exec::parallel));
    close(weighted_mass(a, {}, Exec::serial), weighted_mass(a, {}, Exec::parallel));
    for (double p : {1.0, 2.0, 3.5}) {
      close(power_sum(a, p, mask, Exec::serial), power_sum(a, p, mask, Exec::parallel));
      close(product_power_sum(a, b, p, {}, Exec::serial), product_power_sum(a, b, p, {}, Exec::parallel));
    }
    double naive = 0.0;
    for (std::size_t k = 0; k < n; ++k) naive += w[k] * std::norm(a[k]);
    EXPECT_NEAR(weighted_mass(a, w), naive, 1e-12 * naive);
  }
}

TEST(Kernels, ResultIndependentOfThreadCount) {
  auto a = random_values(50000, 7);
  int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  double one = power_sum(a, 3.0, {});
  omp_set_num_threads(4);
  double four = power_sum(a, 3.0, {});
  omp_set_num_threads(saved);
  EXPECT_EQ(one, four);
}

TEST(Kernels, MultiplyInplace) {
  auto a = random_values(10000, 3), m = random_values(10000, 4);
  auto s = a, p = a;
  multiply_inplace(s, m, Exec::serial);
  multiply_inplace(p, m, Exec::parallel);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(s[k], p[k]);
    EXPECT_EQ(s[k], a[k] * m[k]);
  }
}

TEST(Kernels, OscillatorySum) {
  // Two frequencies in one dimension, checked against the closed form.
  std::vector<double> xi = {0.25, -0.5}, phi = {0.0625, 0.25};
  std::vector<cplx> w = {cplx(1.0, 0.0), cplx(0.0, 2.0)};
  std::vector<double> x;
  for (int j = 0; j < 50; ++j) {
    x.push_back(0.1 * j - 2.0);
    x.push_back(0.03 * j);
  }
  auto par = oscillatory_sum(xi, phi, w, 1, x, Exec::parallel);
  auto ser = oscillatory_sum(xi, phi, w, 1, x, Exec::serial);
  for (int j = 0; j < 50; ++j) {
    cplx expected(0.0, 0.0);
    for (int k = 0; k < 2; ++k) expected += w[k] * std::exp(cplx(0.0, 2 * M_PI * (x[2 * j] * xi[k] + x[2 * j + 1] * phi[k])));
    EXPECT_NEAR(std::abs(par[j] - expected), 0.0, 1e-13);
    EXPECT_EQ(par[j], ser[j]);
  }
}

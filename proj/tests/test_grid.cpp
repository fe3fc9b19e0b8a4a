#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rlab/error.hpp"
#include "rlab/grid.hpp"
#include "rlab/random.hpp"

using namespace rlab;

namespace {

Field random_field(const FourierGrid& g, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  Field f = zeros(g);
  for (auto& v : f.values) v = cplx(gaussian(rng), gaussian(rng));
  return f;
}

double rel_diff(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    num += std::norm(a.values[k] - b.values[k]);
    den += std::norm(b.values[k]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST(MakeGrid, LatticeExamples) {
  FourierGrid g = make_grid(1, 8, M_PI);
  std::vector<double> got;
  for (int j = 0; j < 8; ++j) got.push_back(g.freq(j));
  std::sort(got.begin(), got.end());
  for (int k = -4; k <= 3; ++k) EXPECT_NEAR(got[k + 4], k, 1e-15);
  EXPECT_EQ(make_grid(3, 64, M_PI).size(), 262144u);
  EXPECT_DOUBLE_EQ(g.coord(0), -M_PI);
}

TEST(MakeGrid, Errors) {
  try {
    make_grid(2, 7, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonPowerOfTwo);
  }
  try {
    make_grid(3, 1024, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MemoryCap);
  }
}

TEST(Transform, ConstantConcentratesAtZero) {
  FourierGrid g = make_grid(2, 16, 1.0);
  Field f = sample(g, [](std::span<const double>) { return cplx(1.0, 0.0); });
  Field hat = transform(f, Direction::forward);
  EXPECT_NEAR(std::abs(hat.values[0]), 16.0, 1e-12);
  for (std::size_t k = 1; k < hat.values.size(); ++k) EXPECT_LT(std::abs(hat.values[k]), 1e-12);
}

TEST(Transform, PureModeIsSingleCoefficient) {
  FourierGrid g = make_grid(2, 16, 2.0);
  double xi0 = 3 * g.freq_spacing(), xi1 = -5 * g.freq_spacing();
  Field f = sample(g, [&](std::span<const double> x) { return std::exp(cplx(0.0, xi0 * x[0] + xi1 * x[1])); });
  Field hat = transform(f, Direction::forward);
  std::size_t expected = 3 * 16 + (16 - 5);
  for (std::size_t k = 0; k < hat.values.size(); ++k) {
    if (k == expected)
      EXPECT_NEAR(std::abs(hat.values[k]), 16.0, 1e-10);
    else
      EXPECT_LT(std::abs(hat.values[k]), 1e-10);
  }
  // Centred phase: a real even function has a real transform.
  Field gauss = sample(g, [](std::span<const double> x) { return cplx(std::exp(-4.0 * (x[0] * x[0] + x[1] * x[1])), 0.0); });
  Field gh = transform(gauss, Direction::forward);
  for (const auto& v : gh.values) EXPECT_LT(std::abs(v.imag()), 1e-12);
  EXPECT_GT(gh.values[0].real(), 0.0);
}

TEST(Transform, RepresentationMismatch) {
  FourierGrid g = make_grid(1, 8, 1.0);
  Field f = zeros(g, Representation::frequency);
  EXPECT_THROW(transform(f, Direction::forward), Error);
}

class RoundTrip : public ::testing::TestWithParam<std::tuple<int, int, double>> {};

TEST_P(RoundTrip, HundredRandomFields) {
  auto [d, n, L] = GetParam();
  FourierGrid g = make_grid(d, n, L);
  for (int s = 0; s < 100; ++s) {
    Field f = random_field(g, 1000 + s);
    Field hat = transform(f, Direction::forward);
    Field back = transform(hat, Direction::inverse);
    EXPECT_LT(rel_diff(back, f), 1e-12);
    double phys = l2_mass(f), freq = l2_mass(hat);
    EXPECT_NEAR(freq / phys, 1.0, 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Configs, RoundTrip,
                         ::testing::Values(std::make_tuple(1, 256, M_PI), std::make_tuple(2, 32, 1.5),
                                           std::make_tuple(3, 16, 2.0)));

TEST(LpNorm, ConstantAndMax) {
  FourierGrid g = make_grid(2, 32, 1.5);
  Field one = sample(g, [](std::span<const double>) { return cplx(1.0, 0.0); });
  EXPECT_NEAR(lp_norm(one, 2.0), std::pow(3.0, 1.0), 1e-12);
  auto bump = smooth_bump({}, 0.0, 1.0);
  Field b = sample(g, [&](std::span<const double> x) { return cplx(bump(x[0]) * bump(x[1]), 0.0); });
  double mx = 0.0;
  for (const auto& v : b.values) mx = std::max(mx, std::abs(v));
  EXPECT_DOUBLE_EQ(lp_norm(b, INFINITY), mx);
}

TEST(LpNorm, GaussianIntegral) {
  // Closed form: integral of exp(-|x|^2 / (2 s^2)) over R^d is (2 pi s^2)^{d/2}.
  const double s = 0.5;
  for (int d = 1; d <= 3; ++d) {
    FourierGrid g = make_grid(d, d == 3 ? 64 : 128, 4.0);
    Field f = sample(g, [&](std::span<const double> x) {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      return cplx(std::exp(-r2 / (2 * s * s)), 0.0);
    });
    double exact = std::pow(2 * M_PI * s * s, d / 2.0);
    EXPECT_NEAR(lp_norm(f, 1.0) / exact, 1.0, 0.01);
  }
}

TEST(LpNorm, MonotoneHomogeneousHolder) {
  FourierGrid g = make_grid(2, 32, 2.0);
  for (int t = 0; t < 10; ++t) {
    Field u = random_field(g, 50 + t);
    Field v = random_field(g, 90 + t);
    double prev = 0.0;
    for (double r : {0.5, 1.0, 1.5, 2.0, 3.0}) {
      double val = lp_norm(u, 3.0, Ball{{0.1, -0.2}, r});
      EXPECT_GE(val, prev);
      prev = val;
    }
    EXPECT_NEAR(lp_norm(scale(u, cplx(0.0, -2.5)), 1.5), 2.5 * lp_norm(u, 1.5), 1e-10);
    EXPECT_LE(lp_norm(multiply(u, v), 1.0), lp_norm(u, 2.0) * lp_norm(v, 2.0) * (1 + 1e-12));
  }
}

TEST(ApplyMultiplier, IdentityProjectionAndComposition) {
  FourierGrid g = make_grid(2, 32, M_PI);
  Field u = random_field(g, 7);
  Field same = apply_multiplier(u, [](std::span<const double>) { return cplx(1.0, 0.0); });
  EXPECT_LT(rel_diff(same, u), 1e-13);

  const double A = 4.5;
  auto low = [A](std::span<const double> xi) { return cplx(std::hypot(xi[0], xi[1]) <= A ? 1.0 : 0.0, 0.0); };
  Field p = to_frequency(apply_multiplier(u, low));
  Field uh = to_frequency(u);
  std::vector<double> xi(2);
  for (std::size_t k = 0; k < p.values.size(); ++k) {
    g.frequency(k, xi);
    if (std::hypot(xi[0], xi[1]) <= A)
      EXPECT_NEAR(std::abs(p.values[k] - uh.values[k]), 0.0, 1e-12);
    else
      EXPECT_NEAR(std::abs(p.values[k]), 0.0, 1e-12);
  }

  auto m1 = [](std::span<const double> xi) { return cplx(std::cos(xi[0]), xi[1]); };
  auto m2 = [](std::span<const double> xi) { return cplx(1.0 / (1.0 + xi[0] * xi[0]), 0.3); };
  Field twice = apply_multiplier(apply_multiplier(u, m1), m2);
  Field once = apply_multiplier(u, [&](std::span<const double> xi) { return m1(xi) * m2(xi); });
  EXPECT_LT(rel_diff(twice, once), 1e-12);
}

TEST(ApplyMultiplier, NonFiniteRejected) {
  FourierGrid g = make_grid(1, 16, 1.0);
  Field u = random_field(g, 3);
  try {
    apply_multiplier(u, [](std::span<const double> xi) { return cplx(1.0 / xi[0], 0.0); });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
  }
}

TEST(ApplyMultiplier, DerivativeOfSine) {
  FourierGrid g = make_grid(1, 64, M_PI);
  Field s = sample(g, [](std::span<const double> x) { return cplx(std::sin(3 * x[0]), 0.0); });
  Field ds = partial_derivative(s, 0);
  Field c = sample(g, [](std::span<const double> x) { return cplx(3 * std::cos(3 * x[0]), 0.0); });
  EXPECT_LT(rel_diff(ds, c), 1e-12);
}

TEST(SmoothBump, ValuesAndEdgeDerivative) {
  for (BumpKind kind : {BumpKind::smooth_exponential, BumpKind::cosine_taper}) {
    auto b = smooth_bump({kind, 1.0}, 0.3, 0.1);
    EXPECT_DOUBLE_EQ(b(0.3), 1.0);
    EXPECT_EQ(b(0.45), 0.0);
    EXPECT_EQ(b(0.1), 0.0);
    EXPECT_GT(b(0.35), 0.0);
    EXPECT_LE(b(0.35), 1.0);
  }
  auto b = smooth_bump({}, 0.0, 1.0);
  const double h = 1e-4;
  for (double edge : {-1.0, 1.0}) {
    double t = edge * (1.0 - h);
    double deriv = (b(t + h) - b(t - h)) / (2 * h);
    EXPECT_LT(std::abs(deriv), 1e-6);
  }
  EXPECT_DOUBLE_EQ(smooth_step(0.5), 1.0);
  EXPECT_DOUBLE_EQ(smooth_step(2.5), 0.0);
  EXPECT_NEAR(smooth_step(1.5), 0.5, 1e-15);
}

TEST(Serialization, RoundTripAndHeader) {
  FourierGrid g = make_grid(2, 8, 1.25);
  Field u = random_field(g, 11);
  auto path = (std::filesystem::temp_directory_path() / "rlab_field_test.bin").string();
  write_field(path, u);
  Field back = read_field(path);
  EXPECT_EQ(back.grid, g);
  for (std::size_t k = 0; k < u.values.size(); ++k) EXPECT_EQ(back.values[k], u.values[k]);
  std::ifstream is(path, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), {});
  ASSERT_EQ(bytes.size(), 5u + 24u + 16u * 64u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 5), "RLAB1");
  EXPECT_EQ(bytes[5], 2);
  EXPECT_EQ(bytes[13], 8);
  std::filesystem::remove(path);
}

TEST(SpectralSupport, WarnsOnOuterQuarter) {
  FourierGrid g = make_grid(1, 64, M_PI);
  Field low = sample(g, [](std::span<const double> x) { return cplx(std::cos(5 * x[0]), 0.0); });
  Field high = sample(g, [](std::span<const double> x) { return cplx(std::cos(20 * x[0]), 0.0); });
  EXPECT_FALSE(spectral_support_warning(low));
  EXPECT_TRUE(spectral_support_warning(high));
}

#include <gtest/gtest.h>

#include <cmath>

#include "rlab/axis.hpp"
#include "rlab/bilinear.hpp"
#include "rlab/constants.hpp"
#include "rlab/error.hpp"
#include "rlab/grid.hpp"
#include "rlab/radon.hpp"
#include "rlab/random.hpp"

using namespace rlab;

namespace {

template <class F>
void expect_error(ErrorKind kind, F&& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

std::vector<double> dyadic(int from, int to) {
  std::vector<double> v;
  for (int k = from; k <= to; ++k) v.push_back(std::ldexp(1.0, -k));
  return v;
}

const Constants& constants() {
  static Constants c = load_constants(RLAB_CONSTANTS_FILE);
  return c;
}

}  // namespace

TEST(BilinearRatio, ZeroDenominator) {
  SurfaceGraph s = make_paraboloid(2);
  auto pair = random_pair(s, 0.125, 0.125, 1);
  NeighborhoodField zero = pair.g;
  zero.entries.clear();
  expect_error(ErrorKind::ZeroDenominator, [&] { bilinear_ratio(pair.f, zero, 2.0, std::nullopt); });
  expect_error(ErrorKind::InvalidArgument, [&] { bilinear_ratio(pair.f, pair.g, 2.5, std::nullopt); });
}

TEST(BilinearRatio, SingleModeIsInverseRootVolume) {
  for (int n : {2, 3}) {
    NeighborhoodField f;
    f.surface = make_paraboloid(n);
    f.lattice = {1.0 / 8, 1.0 / 16};
    f.entries.push_back({{3, 1, 0}, 2, cplx(0.5, -1.0)});
    double volume = std::pow(1.0 / f.lattice.h, n - 1) / f.lattice.dt;
    EXPECT_NEAR(bilinear_ratio(f, f, 2.0, std::nullopt) * std::sqrt(volume), 1.0, 1e-12);
  }
}

TEST(BilinearRatio, CoLocatedCapsAtEqualWidths) {
  // p' = 2 and p' = (n+1)/n; prediction mu^{(n+1)/2p}
  for (int n : {2, 3}) {
    for (double pp : {2.0, (n + 1.0) / n}) {
      for (double mu : n == 2 ? dyadic(4, 6) : dyadic(3, 5)) {
        auto pair = extremal_pair(make_paraboloid(n), Construction::colocated_cap, mu, mu);
        double ratio = bilinear_ratio(pair.f, pair.g, pp, experiment_radius(mu));
        double rate = std::pow(mu, (n + 1) * (1 - 1 / pp) / 2);  // 1/p = 1 - 1/p'
        EXPECT_GE(ratio / rate, 0.3) << n << " " << pp << " " << mu;
        EXPECT_LE(ratio / rate, 3.0) << n << " " << pp << " " << mu;
      }
    }
  }
}

TEST(Extremal, RegimeErrors) {
  SurfaceGraph s2 = make_paraboloid(2), s3 = make_paraboloid(3);
  expect_error(ErrorKind::RegimeViolation, [&] { extremal_pair(s2, Construction::translated_cap, 1.0 / 64, 1.0 / 16); });
  expect_error(ErrorKind::RegimeViolation, [&] { extremal_pair(s2, Construction::squashed_cap, 1.0 / 64, 1.0 / 16); });
  expect_error(ErrorKind::RegimeViolation, [&] { extremal_pair(s3, Construction::squashed_cap, 1.0 / 16, 1.0 / 2); });
  expect_error(ErrorKind::RegimeViolation, [&] { extremal_pair(s3, Construction::narrow_translated_cap, 1.0 / 16, 1.0 / 32); });
}

TEST(Extremal, TranslateHasEqualModulus) {
  // on the paraboloid the translate is exact, so |Eg| = |Ef| pointwise
  auto pair = extremal_pair(make_paraboloid(3), Construction::squashed_cap, 1.0 / 16, 1.0 / 8);
  ASSERT_EQ(pair.f.entries.size(), pair.g.entries.size());
  std::vector<double> pts = {1.0, -2.0, 3.0, 0.0, 5.0, -7.5, 11.0, 0.25, 2.0};
  auto ef = extension_eval(pair.f, pts), eg = extension_eval(pair.g, pts);
  for (std::size_t j = 0; j < ef.size(); ++j) EXPECT_NEAR(std::abs(ef[j]), std::abs(eg[j]), 1e-12);
}

TEST(Extremal, SquashedCapLowerBound) {
  const int n = 3;
  const double pp = 1.5, p = 3.0, mu = 1.0 / 64, nu = 1.0 / 8;
  auto pair = extremal_pair(make_paraboloid(n), Construction::squashed_cap, mu, nu);
  double ratio = bilinear_ratio(pair.f, pair.g, pp, experiment_radius(mu));
  EXPECT_GE(ratio / (std::pow(mu, n / (2 * p)) * std::pow(nu, 1 / p)), 0.1);
}

TEST(Extremal, NarrowTranslatedCapLowerBoundInPlane) {
  const double pp = 2.0, p = 2.0;
  for (double mu : dyadic(4, 6))
    for (double nu = mu; nu <= std::sqrt(mu); nu *= 2) {
      auto pair = extremal_pair(make_paraboloid(2), Construction::narrow_translated_cap, mu, nu);
      double ratio = bilinear_ratio(pair.f, pair.g, pp, experiment_radius(mu));
      EXPECT_GE(ratio / std::pow(mu * nu, 1 / p), 0.1);
    }
}

TEST(Extremal, SharpnessAcrossLevels) {
  // extremal ratio divided by its claimed rate stays above a fixed c
  for (int n : {2, 3}) {
    const double pp = n / (n - 1.0), p = n;
    std::vector<double> full, squashed;
    for (double mu : n == 2 ? dyadic(4, 7) : dyadic(3, 5)) {
      auto t = extremal_pair(make_paraboloid(n), Construction::translated_cap, mu, 0.5);
      full.push_back(bilinear_ratio(t.f, t.g, pp, experiment_radius(mu)) / std::pow(mu, (n + 1) / (2 * p)));
      if (n == 3) {
        double nu = std::ldexp(1.0, static_cast<int>(std::floor(std::log2(std::sqrt(mu)))));
        auto q = extremal_pair(make_paraboloid(n), Construction::squashed_cap, mu, nu);
        squashed.push_back(bilinear_ratio(q.f, q.g, pp, experiment_radius(mu)) /
                           (std::pow(mu, n / (2 * p)) * std::pow(nu, 1 / p)));
      }
    }
    for (double c : full) EXPECT_GE(c, 0.1);
    for (double c : squashed) EXPECT_GE(c, 0.1);
  }
}

TEST(KEstimate, InsufficientLevels) {
  expect_error(ErrorKind::InsufficientLevels,
               [] { k_estimate_and_fit(make_paraboloid(2), 2.0, {1.0 / 16}, {1.0 / 16}, 0, 1); });
}

TEST(KEstimate, PlaneExponents) {
  auto k = k_estimate_and_fit(make_paraboloid(2), 2.0, dyadic(4, 7), dyadic(2, 7), 2, 17);
  EXPECT_NEAR(k.e_mu, 0.5, 0.1);
  EXPECT_NEAR(k.e_nu, 0.5, 0.1);
  EXPECT_EQ(k.cell_max.size(), 14u);
  // frozen upper envelope at p' = n/(n-1) with delta = 0.05
  const double C = constants().get("bilinear_upper_C_n2"), d = 0.05;
  for (const auto& r : k.rows) EXPECT_LE(r.ratio, C * std::pow(r.mu, 0.5 - d) * std::pow(r.nu, 0.5 - d));
}

TEST(KEstimate, SpaceExponents) {
  auto k = k_estimate_and_fit(make_paraboloid(3), 1.5, dyadic(3, 6), dyadic(2, 6), 1, 23);
  EXPECT_NEAR(k.e_mu, 0.5, 0.1);
  EXPECT_NEAR(k.e_nu, 1.0 / 3, 0.1);
  const double C = constants().get("bilinear_upper_C_n3"), d = 0.05;
  for (const auto& r : k.rows) EXPECT_LE(r.ratio, C * std::pow(r.mu, 0.5 - d) * std::pow(r.nu, 1.0 / 3 - d));
}

TEST(KEstimate, TomasSteinRegime) {
  KEstimateOptions o;
  o.regime = Regime::tomas_stein;
  auto k = k_estimate_and_fit(make_paraboloid(2), 2.0, dyadic(4, 7), dyadic(1, 4), 1, 5, o);
  EXPECT_NEAR(k.e_mu, 0.75, 0.1);
  EXPECT_NEAR(k.e_nu, 0.0, 0.1);
}

TEST(Surfaces, HemisphereAgreesWithParaboloidOnSmallCaps) {
  const double mu = 1.0 / 32, nu = 1.0 / 16;
  for (int n : {2, 3}) {
    SurfaceGraph par = make_paraboloid(n), hem = make_hemisphere(n, 0.75);
    const double pp = n / (n - 1.0);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      auto a = random_pair(par, mu, nu, seed, 0.2), b = random_pair(hem, mu, nu, seed, 0.2);
      double ra = bilinear_ratio(a.f, a.g, pp, experiment_radius(mu));
      double rb = bilinear_ratio(b.f, b.g, pp, experiment_radius(mu));
      EXPECT_LE(std::max(ra / rb, rb / ra), 2.0);
    }
    Construction kind = n == 2 ? Construction::narrow_translated_cap : Construction::squashed_cap;
    auto a = extremal_pair(par, kind, mu, nu), b = extremal_pair(hem, kind, mu, nu);
    double ra = bilinear_ratio(a.f, a.g, pp, experiment_radius(mu));
    double rb = bilinear_ratio(b.f, b.g, pp, experiment_radius(mu));
    EXPECT_LE(std::max(ra / rb, rb / ra), 2.0);
  }
}

TEST(Surfaces, EllipticSurfaceSupportsConstructions) {
  SurfaceGraph s = make_elliptic(2, 0.1, 3);
  auto pair = extremal_pair(s, Construction::narrow_translated_cap, 1.0 / 32, 1.0 / 8);
  for (const auto& e : pair.g.entries) EXPECT_LE(std::abs(e.slice) * pair.g.lattice.dt, 1.0 / 8 + 1e-12);
  EXPECT_GT(bilinear_ratio(pair.f, pair.g, 2.0, experiment_radius(1.0 / 32)), 0.0);
}

TEST(AxisLemma, ZeroAndWitness) {
  for (double pp : {1.0, 1.5, 2.0}) {
    for (double mu : dyadic(2, 6)) {
      const double h = 0.25;
      const int len = 1 << static_cast<int>(std::ceil(std::log2(8.0 / (mu * h))));
      std::vector<cplx> zero(len), ind(len);
      for (int j = 0; j < len; ++j) {
        double x = (j - len / 2) * h;
        ind[j] = std::abs(x) < 1.0 / mu ? 1.0 : 0.0;
      }
      EXPECT_EQ(axis_bound(zero, ind, h, mu, pp).lhs, 0.0);
      AxisBound w = axis_bound(ind, ind, h, mu, pp);
      EXPECT_LE(w.lhs, w.rhs);
      EXPECT_GE(w.lhs / w.rhs, 0.2) << pp << " " << mu;
      // the Gaussian profile's Young constant
      EXPECT_NEAR(w.constant, std::pow(pp, -1.0 / (2 * pp)), 1e-6);
    }
  }
}

TEST(AxisLemma, RandomPairsNeverViolate) {
  Rng rng = make_rng(2024);
  int violations = 0;
  for (double mu : dyadic(2, 6)) {
    const double h = 0.25;
    const int len = 1 << static_cast<int>(std::ceil(std::log2(4.0 / (mu * h))));
    for (int t = 0; t < 100; ++t) {
      double pp = uniform(rng, 1.0, 2.0);
      std::vector<cplx> a(len), b(len);
      double wa = uniform(rng, 1.0, 0.5 * len * h), wb = uniform(rng, 1.0, 0.5 * len * h);
      for (int j = 0; j < len; ++j) {
        double x = (j - len / 2) * h;
        a[j] = cplx(gaussian(rng), gaussian(rng)) * std::exp(-x * x / (wa * wa));
        b[j] = cplx(gaussian(rng), gaussian(rng)) * std::exp(-x * x / (wb * wb));
      }
      AxisBound r = axis_bound(a, b, h, mu, pp);
      if (r.lhs > r.rhs * (1 + 1e-12)) ++violations;
    }
  }
  EXPECT_EQ(violations, 0);
  std::vector<cplx> shortv(8);
  expect_error(ErrorKind::InvalidArgument, [&] { axis_bound(shortv, shortv, 0.25, 0.25, 2.0); });
}

TEST(L2Bilinear, TrivialCases) {
  auto [f, g] = separated_density_pair(2, 16, 3);
  NeighborhoodField zero = f;
  for (auto& e : zero.entries) e.value = 0.0;
  EXPECT_EQ(l2_bilinear_check(zero, g, 16).lhs, 0.0);
  NeighborhoodField near = g;
  near.entries.front().idx[0] = f.entries.back().idx[0] + 1;
  expect_error(ErrorKind::SeparationViolation, [&] { l2_bilinear_check(f, near, 16); });
}

TEST(L2Bilinear, PointMassReducesToEvaluation) {
  const double R = 16;
  auto [f, g] = separated_density_pair(2, R, 5);
  NeighborhoodField point = f;
  point.entries = {{{-20, 0, 0}, 0, cplx(3.0, 4.0)}};
  L2BilinearCheck c = l2_bilinear_check(point, g, R);
  // one point: Radon transform in one base dimension is evaluation, |F| = 5
  EXPECT_NEAR(c.radon_sup, 5.0, 1e-12);
  // |E point| = |F| h is constant, so lhs = 25 h^2 ||Eg||^2_{L^2(B_R)}
  const NeighborhoodField* fs[] = {&point, &g};
  EvalLayout L = make_layout(fs, R);
  double h = point.lattice.h, eg = 0.0;
  std::vector<double> x(2);
  for (double xn : L.xn)
    for (int l = 0; l < L.m; ++l) {
      x[0] = L.x_coord(l);
      x[1] = xn;
      if (x[0] * x[0] + xn * xn > R * R) continue;
      eg += std::norm(extension_eval(g, x)[0]);
    }
  eg *= L.point_weight();
  EXPECT_NEAR(c.lhs / (25 * h * h * eg), 1.0, 1e-9);
}

TEST(L2Bilinear, RandomSeparatedPairsWithinFrozenConstant) {
  for (int n : {2, 3}) {
    const double C = constants().get("radon_l2_C_n" + std::to_string(n));
    int violations = 0;
    for (std::uint64_t seed = 500; seed < 510; ++seed) {
      auto [f, g] = separated_density_pair(n, 16, seed);
      L2BilinearCheck c = l2_bilinear_check(f, g, 16);
      if (c.lhs > C * c.rhs) ++violations;
    }
    EXPECT_EQ(violations, 0);
  }
}

namespace {

// Frequency-side indicator of the mu-neighbourhood of the circle |xi'' - e2| = 1,
// xi_1 = 0, optionally restricted to an arc of angular half-width `arc` around
// the point nearest `dir`, with random phases when `rng` is given.
Field sphere_field(const FourierGrid& g, double mu, double arc, double dir, Rng* rng) {
  Field f = zeros(g, Representation::frequency);
  std::vector<double> xi(3);
  for (std::size_t k = 0; k < g.size(); ++k) {
    g.frequency(k, xi);
    double a = xi[1] - 1.0, b = xi[2];
    double r = std::hypot(a, b);
    if (std::abs(xi[0]) > mu / 2 || std::abs(r - 1.0) > mu / 2) continue;
    double ang = std::atan2(b, a);
    double d = std::remainder(ang - dir, 2 * M_PI);
    if (std::abs(d) > arc) continue;
    f.values[k] = rng ? cplx(gaussian(*rng), gaussian(*rng)) : cplx(1.0, 0.0);
  }
  return to_physical(f);
}

}  // namespace

TEST(SlicingConsistency, SphereFieldsBoundedByCombinedRate) {
  // ||fg||_2 / (||f|| ||g||) over mu-neighbourhoods of a circle in R^3 stays within
  // a fixed multiple of mu^{(d+2)/2p} (p = 2): no growth as mu shrinks.
  FourierGrid g = make_grid(3, 128, 16 * M_PI);
  Rng rng = make_rng(77);
  std::vector<double> knapp, random;
  for (double mu : {0.5, 0.25, 0.125}) {
    const double rate = std::pow(mu, 5.0 / 4.0);
    Field k = sphere_field(g, mu, 0.5 * std::sqrt(mu), 0.3, nullptr);
    double nk = std::sqrt(l2_mass(k));
    knapp.push_back(lp_norm(multiply(k, k), 2.0) / (nk * nk) / rate);
    Field a = sphere_field(g, mu, M_PI, 0.0, &rng), b = sphere_field(g, mu, M_PI, 0.0, &rng);
    random.push_back(lp_norm(multiply(a, b), 2.0) / std::sqrt(l2_mass(a) * l2_mass(b)) / rate);
  }
  for (int i = 0; i < 3; ++i) {
    EXPECT_LE(knapp[i], 2.0 * knapp[0]);
    EXPECT_GE(knapp[i], 0.5 * knapp[0]);
    EXPECT_LE(random[i], 2.0 * knapp[0]);
  }
}

#include <gtest/gtest.h>

#include <cmath>

#include "rlab/error.hpp"
#include "rlab/radon.hpp"
#include "rlab/random.hpp"
#include "rlab/surface.hpp"

using namespace rlab;

namespace {

// Central second differences of surface_phi.
Eigen::MatrixXd fd_hessian(const SurfaceGraph& s, std::vector<double> x, double e = 1e-4) {
  const int m = static_cast<int>(x.size());
  Eigen::MatrixXd H(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      auto at = [&](double da, double db) {
        auto y = x;
        y[a] += da;
        y[b] += db;
        return surface_phi(s, y);
      };
      H(a, b) = (at(e, e) - at(e, -e) - at(-e, e) + at(-e, -e)) / (4 * e * e);
    }
  return H;
}

template <class F>
void expect_error(ErrorKind kind, F&& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(Surface, ParaboloidAtOrigin) {
  for (int n : {2, 3, 4}) {
    SurfaceGraph s = make_paraboloid(n);
    std::vector<double> zero(n - 1, 0.0);
    EXPECT_EQ(surface_phi(s, zero), 0.0);
    EXPECT_EQ(surface_gradient(s, zero).norm(), 0.0);
    EXPECT_TRUE(surface_hessian(s, zero).isApprox(Eigen::MatrixXd::Identity(n - 1, n - 1)));
  }
}

TEST(Surface, HemisphereClosedForm) {
  SurfaceGraph s = make_hemisphere(3);
  std::vector<double> x = {0.3, 0.4};
  EXPECT_NEAR(surface_phi(s, x), 1.0 - std::sqrt(0.75), 1e-15);
  Eigen::VectorXd g = surface_gradient(s, x);
  for (int a = 0; a < 2; ++a) {
    auto p = x, q = x;
    p[a] += 1e-6;
    q[a] -= 1e-6;
    EXPECT_NEAR(g(a), (surface_phi(s, p) - surface_phi(s, q)) / 2e-6, 1e-8);
  }
  EXPECT_LT((surface_hessian(s, x) - fd_hessian(s, x)).norm(), 1e-5);
}

TEST(Surface, DomainErrors) {
  expect_error(ErrorKind::DomainViolation, [] { make_hemisphere(2, 0.81); });
  SurfaceGraph s = make_hemisphere(2, 0.75);
  std::vector<double> out = {0.76};
  expect_error(ErrorKind::DomainViolation, [&] { surface_phi(s, out); });
  SurfaceGraph p = make_paraboloid(3, 1.0);
  std::vector<double> far = {0.8, 0.8};
  expect_error(ErrorKind::DomainViolation, [&] { surface_gradient(p, far); });
  expect_error(ErrorKind::InvalidArgument, [] { make_paraboloid(5); });
}

TEST(Surface, EllipticHessianBracket) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (int n : {2, 3}) {
      SurfaceGraph s = make_elliptic(n, 0.1, seed);
      std::vector<double> zero(n - 1, 0.0);
      EXPECT_NEAR(surface_phi(s, zero), 0.0, 1e-15);
      EXPECT_LT(surface_gradient(s, zero).norm(), 1e-15);
      // independent sweep from second differences of Phi
      const double step = n == 2 ? 0.02 : 0.1;
      double lo = 10, hi = -10;
      std::vector<double> x(n - 1);
      int steps = static_cast<int>(0.95 / step);
      for (int i = -steps; i <= steps; ++i)
        for (int j = (n == 3 ? -steps : 0); j <= (n == 3 ? steps : 0); ++j) {
          x[0] = i * step;
          if (n == 3) x[1] = j * step;
          double r = 0.0;
          for (double v : x) r += v * v;
          if (std::sqrt(r) > 0.95) continue;
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fd_hessian(s, x));
          lo = std::min(lo, es.eigenvalues().minCoeff());
          hi = std::max(hi, es.eigenvalues().maxCoeff());
        }
      EXPECT_GE(lo, 0.9 - 1e-6);
      EXPECT_LE(hi, 1.1 + 1e-6);
      auto [l2, h2] = hessian_eigen_range(s, step);
      EXPECT_GE(l2, 0.9 - 1e-12);
      EXPECT_LE(h2, 1.1 + 1e-12);
    }
  }
}

TEST(Surface, ParabolicRescaling) {
  SurfaceGraph s = make_hemisphere(3, 0.75);
  SurfaceGraph r = rescaled(s, 0.25);
  std::vector<double> eta = {1.2, -0.8}, xi = {0.3, -0.2};
  EXPECT_NEAR(surface_phi(r, eta), surface_phi(s, xi) / 0.0625, 1e-14);
  EXPECT_TRUE(surface_hessian(r, eta).isApprox(surface_hessian(s, xi), 1e-14));
  std::vector<double> outside = {3.0, 0.1};
  expect_error(ErrorKind::DomainViolation, [&] { surface_phi(r, outside); });
}

namespace {

LatticeDensity box_density(int dim, double h, int half, double value) {
  LatticeDensity d;
  d.dim = dim;
  d.h = h;
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) {
    d.lo[a] = -half;
    d.count[a] = 2 * half + 1;
    total *= d.count[a];
  }
  d.values.assign(total, value);
  return d;
}

}  // namespace

TEST(Radon, BoxCrossSection) {
  // constant 2 on the lattice points of [-1, 1]^2; the linear interpolant tapers to
  // zero over one spacing, so a central cross-section has length 2 + h
  LatticeDensity d = box_density(2, 0.1, 10, 2.0);
  std::vector<double> c = {0.0, 0.0}, th = {1.0, 0.0};
  EXPECT_NEAR(radon_hyperplane(d, c, th), 2.0 * 2.1, 1e-12);
  LatticeDensity one = box_density(1, 0.1, 10, 3.0);
  std::vector<double> p = {0.05}, t1 = {1.0};
  EXPECT_NEAR(radon_hyperplane(one, p, t1), 3.0, 1e-14);
  std::vector<double> bad = {0.6, 0.6};
  expect_error(ErrorKind::InvalidArgument, [&] { radon_hyperplane(d, c, bad); });
}

TEST(Radon, RotationInvariantForRadialGaussian) {
  LatticeDensity d = box_density(2, 0.02, 100, 0.0);
  for (int i = 0; i < d.count[0]; ++i)
    for (int j = 0; j < d.count[1]; ++j) {
      double x = (i - 100) * 0.02, y = (j - 100) * 0.02;
      d.values[i * d.count[1] + j] = std::exp(-8.0 * (x * x + y * y));
    }
  std::vector<double> xi = {0.1, -0.05};
  std::vector<double> th0 = {1.0, 0.0};
  // exact line integral of exp(-8 r^2) at offset s = <xi, theta>: sqrt(pi/8) exp(-8 s^2)
  auto exact = [&](const std::vector<double>& th) {
    double s = xi[0] * th[0] + xi[1] * th[1];
    return std::sqrt(M_PI / 8.0) * std::exp(-8.0 * s * s);
  };
  for (int k = 0; k < 12; ++k) {
    double a = 0.3 + k * M_PI / 12;
    std::vector<double> th = {std::cos(a), std::sin(a)};
    double v = radon_hyperplane(d, xi, th);
    EXPECT_NEAR(v / exact(th), 1.0, 1e-2);
  }
  // Fubini: integrating the transform over offsets recovers the mass
  for (double a : {0.0, 0.7, 2.1}) {
    std::vector<double> th = {std::cos(a), std::sin(a)};
    double s = 0.0, ds = 0.01;
    for (int i = -250; i <= 250; ++i) {
      std::vector<double> p = {i * ds * th[0], i * ds * th[1]};
      s += radon_hyperplane(d, p, th) * ds;
    }
    EXPECT_NEAR(s / d.l1(), 1.0, 1e-2);
  }
}

TEST(Radon, PlaneIntegralInThreeDimensions) {
  LatticeDensity d = box_density(3, 0.1, 5, 1.0);
  std::vector<double> c = {0.0, 0.0, 0.0}, th = {0.0, 0.0, 1.0};
  // same taper argument in each in-plane direction: (1 + h)^2
  EXPECT_NEAR(radon_hyperplane(d, c, th), 1.1 * 1.1, 1e-10);
}

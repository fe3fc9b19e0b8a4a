#include <gtest/gtest.h>

#include <cmath>

#include "rlab/error.hpp"
#include "rlab/extension.hpp"
#include "rlab/fit.hpp"
#include "rlab/grid.hpp"
#include "rlab/random.hpp"
#include "rlab/wavepacket.hpp"

using namespace rlab;

namespace {

double mass(const PacketCoefficients& c) {
  double s = 0.0;
  for (const auto& e : c.entries) s += std::norm(e.a);
  return s;
}

std::vector<double> sample_points(int n, double R, int count, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<double> pts;
  for (int j = 0; j < count; ++j)
    for (int a = 0; a < n; ++a) pts.push_back(uniform(rng, -1.0, 1.0) * R);
  return pts;
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (auto x : v) m = std::max(m, std::abs(x));
  return m;
}

NeighborhoodField test_field(int n, double R, double width, std::uint64_t seed, double radius = 0.5) {
  double h = 1.0 / (20.0 * std::sqrt(R));
  std::vector<double> c(n - 1, 0.1);
  SliceLattice lat{h, width > 0.0 ? width / 4.0 : 1.0};
  return make_neighborhood(make_paraboloid(n), lat, c, radius, width, Profile::random_gaussian(seed));
}

const PacketEntry& largest(const PacketCoefficients& c) {
  const PacketEntry* best = &c.entries.front();
  for (const auto& e : c.entries)
    if (std::abs(e.a) > std::abs(best->a)) best = &e;
  return *best;
}

// Smooth bump exp(1 - 1/(1 - s^2)) written out independently of the library.
double bump(double s) { return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

// Frequency-side field on the width-neighbourhood of the circle |xi'' - e2| = 1,
// xi_1 = 0, restricted to the arc of angular half-width `arc` around angle `dir`,
// with random coefficients.
Field arc_field(const FourierGrid& g, double width, double dir, double arc, Rng& rng) {
  Field f = zeros(g, Representation::frequency);
  std::vector<double> xi(3);
  for (std::size_t k = 0; k < g.size(); ++k) {
    g.frequency(k, xi);
    double r = std::hypot(xi[1] - 1.0, xi[2]);
    if (std::abs(xi[0]) > width / 2 || std::abs(r - 1.0) > width / 2) continue;
    if (std::abs(std::remainder(std::atan2(xi[2], xi[1] - 1.0) - dir, 2 * M_PI)) > arc) continue;
    f.values[k] = cplx(gaussian(rng), gaussian(rng));
  }
  return f;
}

// Fraction of the spectral mass of u * conj(v) where pred(xi_1, |xi''|) holds.
template <class Pred>
double product_mass_fraction(const Field& u, const Field& v, Pred pred) {
  Field p = to_frequency(multiply(to_physical(u), conjugate(to_physical(v))));
  std::vector<double> xi(3);
  double in = 0.0, total = 0.0;
  for (std::size_t k = 0; k < p.values.size(); ++k) {
    p.grid.frequency(k, xi);
    double m = std::norm(p.values[k]);
    total += m;
    if (pred(std::abs(xi[0]), std::hypot(xi[1], xi[2]))) in += m;
  }
  return in / total;
}

}  // namespace

TEST(CapPartition, SquaresSumToOne) {
  for (int n : {2, 3}) {
    for (double R : {64.0, 256.0}) {
      auto p = cap_partition(n - 1, 1.0, R);
      Rng rng = make_rng(11);
      for (int j = 0; j < 300; ++j) {
        std::vector<double> xi(n - 1);
        double r2 = 0.0;
        do {
          r2 = 0.0;
          for (auto& v : xi) {
            v = uniform(rng, -1.0, 1.0);
            r2 += v * v;
          }
        } while (r2 > 1.0);
        double s = 0.0;
        for (std::size_t c = 0; c < p.centers.size(); ++c) s += std::pow(p.zeta(c, xi), 2);
        EXPECT_NEAR(s, 1.0, 1e-10);
      }
      // about |B_1| / (2 R^{-1/2})^{n-1} caps
      double expected = (n == 2 ? 2.0 : M_PI) / std::pow(p.spacing, n - 1);
      double ratio = p.centers.size() / expected;
      EXPECT_GT(ratio, 0.5);
      EXPECT_LT(ratio, 2.0) << "n=" << n << " R=" << R;
    }
  }
}

TEST(CapPartition, SingleCapAndResolution) {
  auto p = cap_partition(2, 0.5, 2.0);
  EXPECT_TRUE(p.single);
  ASSERT_EQ(p.centers.size(), 1u);
  std::vector<double> xi{0.3, -0.2};
  EXPECT_EQ(p.zeta(0, xi), 1.0);
  EXPECT_THROW(
      {
        try {
          cap_partition(1, 1.0, 400.0, 0.03);
        } catch (const Error& e) {
          EXPECT_EQ(e.kind(), ErrorKind::ResolutionLoss);
          throw;
        }
      },
      Error);
}

TEST(WavePacket, ParsevalForSurfaceAndNeighborhoodFields) {
  for (int n : {2, 3}) {
    for (double width : {0.0, 0.05}) {
      if (n == 3 && width > 0.0) continue;
      auto f = test_field(n, 64.0, width, 5, n == 3 ? 0.3 : 0.5);
      auto c = wp_decompose(f, 64.0);
      double fm = std::pow(spectral_norm(f), 2);
      EXPECT_NEAR(mass(c), fm, 1e-8 * fm) << "n=" << n << " width=" << width;
    }
  }
}

TEST(WavePacket, ReconstructionMatchesExtension) {
  for (int n : {2, 3}) {
    const double R = 64.0;
    auto f = test_field(n, R, n == 2 ? 0.05 : 0.0, 9, n == 3 ? 0.3 : 0.5);
    auto c = wp_decompose(f, R);
    auto pts = sample_points(n, R, 200, 4);
    auto direct = extension_eval(f, pts), packets = wp_reconstruct(c, pts);
    double scale = max_abs(direct);
    for (std::size_t j = 0; j < direct.size(); ++j) EXPECT_NEAR(std::abs(direct[j] - packets[j]), 0.0, 1e-6 * scale);
  }
}

TEST(WavePacket, TruncationErrorBoundedByDroppedCoefficients) {
  const double R = 64.0;
  std::vector<double> c0{0.1};
  auto f = make_neighborhood(make_paraboloid(2), {1.0 / 160.0, 1.0}, c0, 0.5, 0.0, Profile::constant_one());
  auto c = wp_decompose(f, R);
  auto pts = sample_points(2, R, 200, 8);
  auto full = wp_reconstruct(c, pts);
  for (double frac : {1e-3, 1e-2, 1e-1}) {
    auto t = truncate(c, frac);
    EXPECT_LT(t.entries.size(), c.entries.size());
    double amax = std::abs(largest(c).a);
    // |phi_T| <= |box|^{1/2}, so the error is at most the dropped l1 mass times that
    double bound = 0.0;
    for (const auto& e : c.entries)
      if (std::abs(e.a) < frac * amax) bound += std::abs(e.a) * std::sqrt(c.box_volume(e.cap));
    auto part = wp_reconstruct(t, pts);
    for (std::size_t j = 0; j < full.size(); ++j) EXPECT_LE(std::abs(full[j] - part[j]), bound * (1 + 1e-9) + 1e-14);
  }
}

TEST(WavePacket, SingleCoefficientIsOnePacket) {
  const double R = 64.0;
  for (double width : {0.0, 0.05}) {
    auto f = test_field(2, R, width, 2);
    auto c = wp_decompose(f, R);
    PacketCoefficients one = c;
    one.entries = {largest(c)};
    const auto& e = one.entries.front();
    auto pts = sample_points(2, R, 60, 5);
    auto rec = wp_reconstruct(one, pts);
    auto phi = packet_field(c, e, pts);

    // Direct sum over the lattice points of the cap.
    const double h = f.lattice.h, dt = f.lattice.dt, s = c.partition.spacing;
    const double center = c.partition.centers[e.cap][0];
    auto w = c.omega(e);
    const auto& box = c.boxes[e.cap];
    for (std::size_t j = 0; j < rec.size(); ++j) {
      double x = pts[2 * j], xn = pts[2 * j + 1];
      cplx sum(0.0, 0.0);
      for (int k = box.lo[0]; k < box.lo[0] + box.count[0]; ++k) {
        double xi = k * h;
        if (std::abs(xi) > 1.0) continue;
        double eta = bump((xi - center) / s);
        if (eta == 0.0) continue;
        double norm = 0.0;
        for (const auto& cc : c.partition.centers) norm += std::pow(bump((xi - cc[0]) / s), 2);
        double zeta = eta / std::sqrt(norm);
        for (int sl = box.slice_lo; sl < box.slice_lo + box.slices; ++sl) {
          double t = sl * dt;
          double turns = w[0] * (xi - center) + w[1] * t + x * xi + xn * (0.5 * xi * xi + t);
          sum += zeta * std::polar(1.0, 2 * M_PI * turns);
        }
      }
      sum *= h * dt / std::sqrt(c.box_volume(e.cap));
      EXPECT_NEAR(std::abs(phi[j] - sum), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(rec[j] - e.a * phi[j]), 0.0, 1e-12);
    }
  }
}

TEST(WavePacket, DecaysAwayFromTube) {
  for (int n : {2, 3}) {
    const double R = 64.0;
    auto f = test_field(n, R, 0.0, 13, n == 3 ? 0.3 : 0.5);
    auto c = wp_decompose(f, R);
    const auto& e = largest(c);
    auto audit = packet_decay_audit(c, e, R / 2, {2.0, 4.0, 8.0});
    EXPECT_GE(audit.exponent, 4.0) << "n=" << n;
    for (double a : audit.amplitudes) EXPECT_LT(a, audit.axis_amplitude);
    auto far = packet_decay_audit(c, e, R / 2, {10.0});
    EXPECT_GE(far.axis_amplitude / far.amplitudes[0], 1e3);
  }
}

TEST(WavePacket, OnAxisAmplitudeScaling) {
  // Interior cap at the origin, omega = 0: the peak is |box|^{-1/2} sum zeta h^{n-1},
  // which scales as R^{-(n-1)/4}.
  for (int n : {2, 3}) {
    std::vector<double> Rs = {64.0, 256.0, 1024.0}, amp;
    for (double R : Rs) {
      double h = 1.0 / (8.0 * std::sqrt(R));
      std::vector<double> c0(n - 1, 0.0);
      auto f = make_neighborhood(make_paraboloid(n), {h, 1.0}, c0, 4.0 / std::sqrt(R), 0.0, Profile::constant_one());
      auto c = wp_decompose(f, R);
      const PacketEntry* pick = nullptr;
      for (const auto& e : c.entries) {
        bool origin = true;
        for (double v : c.partition.centers[e.cap]) origin = origin && std::abs(v) < 1e-12;
        bool zero = e.freq[0] == 0 && e.freq[1] == 0 && e.freq[2] == 0;
        if (origin && zero) pick = &e;
      }
      ASSERT_NE(pick, nullptr);
      std::vector<double> x(n, 0.0);
      amp.push_back(std::abs(packet_field(c, *pick, x)[0]));
    }
    auto fit = fit_power_law(Rs, amp);
    EXPECT_NEAR(fit.exponent, -(n - 1) / 4.0, 0.02) << "n=" << n;
  }
}

TEST(MinkowskiSupport, NeighbouringTransversalCaps) {
  // Caps of diameter rho whose normals differ by 2 rho: the product spectrum
  // sits at |xi''| ~ rho and |xi_1| <= 2 nu.
  FourierGrid g = make_grid(3, 128, 16 * M_PI);
  Rng rng = make_rng(31);
  const double mu = 0.125, nu = 0.25;
  for (double rho : {0.5, 0.7}) {
    Field u = arc_field(g, mu, 0.4, rho / 2, rng), v = arc_field(g, nu, 0.4 + 2 * rho, rho / 2, rng);
    double frac = product_mass_fraction(u, v, [&](double x1, double r) {
      return x1 <= 2 * nu && r >= rho / 2 && r <= 4 * rho;
    });
    EXPECT_GE(frac, 0.99) << "rho=" << rho;
  }
}

TEST(MinkowskiSupport, AntipodalTransversalCaps) {
  // Nearly opposite caps: 2 - |xi''| ~ rho^2.
  FourierGrid g = make_grid(3, 128, 16 * M_PI);
  Rng rng = make_rng(32);
  const double mu = 0.125, nu = 0.125;
  for (double rho : {0.7, 0.9}) {
    Field u = arc_field(g, mu, 0.2, rho / 2, rng), v = arc_field(g, nu, 0.2 + M_PI - 2 * rho, rho / 2, rng);
    double frac = product_mass_fraction(u, v, [&](double x1, double r) {
      return x1 <= 2 * nu && 2.0 - r >= rho * rho / 16 && 2.0 - r <= 4 * rho * rho;
    });
    EXPECT_GE(frac, 0.99) << "rho=" << rho;
  }
}

TEST(WavePacket, ZeroFieldAndLocality) {
  auto f = test_field(2, 64.0, 0.0, 1);
  for (auto& e : f.entries) e.value = 0.0;
  EXPECT_TRUE(wp_decompose(f, 64.0).entries.empty());

  // A field on a small disc around a cap center only touches caps whose support contains it.
  std::vector<double> c0{0.5};
  auto g = make_neighborhood(make_paraboloid(2), {1.0 / 160.0, 1.0}, c0, 0.05, 0.0, Profile::random_gaussian(4));
  auto c = wp_decompose(g, 64.0);
  ASSERT_FALSE(c.entries.empty());
  for (const auto& e : c.entries) EXPECT_LT(std::abs(c.partition.centers[e.cap][0] - 0.5), c.partition.spacing + 0.05);
}

TEST(WavePacket, ParsevalOverRandomFields) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    auto f = test_field(2, 64.0, seed % 2 ? 0.05 : 0.0, seed);
    double fm = std::pow(spectral_norm(f), 2);
    EXPECT_NEAR(mass(wp_decompose(f, 64.0)), fm, 1e-8 * fm);
  }
}

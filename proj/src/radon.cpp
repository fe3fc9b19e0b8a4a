#include "rlab/radon.hpp"

#include <algorithm>
#include <cmath>

#include "rlab/error.hpp"
#include "rlab/random.hpp"

namespace rlab {

double LatticeDensity::at(const std::array<int, 3>& idx) const {
  std::size_t pos = 0;
  for (int a = 0; a < dim; ++a) {
    int k = idx[a] - lo[a];
    if (k < 0 || k >= count[a]) return 0.0;
    pos = pos * count[a] + k;
  }
  return values[pos];
}

double LatticeDensity::interpolate(std::span<const double> xi) const {
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    double u = xi[a] / h;
    base[a] = static_cast<int>(std::floor(u));
    frac[a] = u - base[a];
  }
  double s = 0.0;
  for (int corner = 0; corner < (1 << dim); ++corner) {
    std::array<int, 3> idx = base;
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      bool up = corner >> a & 1;
      idx[a] += up;
      w *= up ? frac[a] : 1.0 - frac[a];
    }
    if (w != 0.0) s += w * at(idx);
  }
  return s;
}

double LatticeDensity::l1() const {
  double s = 0.0;
  for (double v : values) s += std::abs(v);
  return s * std::pow(h, dim);
}

double LatticeDensity::sup() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

LatticeDensity density_from_field(const NeighborhoodField& f) {
  LatticeDensity d;
  d.dim = f.base_dim();
  d.h = f.lattice.h;
  if (f.entries.empty()) {
    d.values.assign(1, 0.0);
    return d;
  }
  std::array<int, 3> hi{0, 0, 0};
  for (int a = 0; a < d.dim; ++a) {
    d.lo[a] = hi[a] = f.entries.front().idx[a];
    for (const auto& e : f.entries) {
      d.lo[a] = std::min(d.lo[a], e.idx[a]);
      hi[a] = std::max(hi[a], e.idx[a]);
    }
    d.count[a] = hi[a] - d.lo[a] + 1;
  }
  std::size_t total = 1;
  for (int a = 0; a < d.dim; ++a) total *= d.count[a];
  d.values.assign(total, 0.0);
  for (const auto& e : f.entries) {
    std::size_t pos = 0;
    for (int a = 0; a < d.dim; ++a) pos = pos * d.count[a] + (e.idx[a] - d.lo[a]);
    d.values[pos] += std::abs(e.value);
  }
  return d;
}

double radon_hyperplane(const LatticeDensity& f, std::span<const double> xi, std::span<const double> theta) {
  const int m = f.dim;
  require(static_cast<int>(xi.size()) == m && static_cast<int>(theta.size()) == m, ErrorKind::InvalidArgument,
          "radon: dimension mismatch");
  double tn = 0.0;
  for (double v : theta) tn += v * v;
  require(std::abs(std::sqrt(tn) - 1.0) < 1e-9, ErrorKind::InvalidArgument, "radon: theta must be a unit vector");
  if (m == 1) return f.interpolate(xi);

  // Reach: distance from xi to the far corner of the support box.
  double reach = 0.0;
  for (int a = 0; a < m; ++a) {
    double lo = f.lo[a] * f.h, hi = (f.lo[a] + f.count[a] - 1) * f.h;
    double d = std::max(std::abs(xi[a] - lo), std::abs(xi[a] - hi));
    reach += d * d;
  }
  reach = std::sqrt(reach) + f.h;
  const double step = 0.5 * f.h;
  const int S = static_cast<int>(std::ceil(reach / step));

  // Orthonormal basis of theta^perp.
  std::vector<std::array<double, 3>> basis;
  {
    std::array<double, 3> th{0, 0, 0};
    for (int a = 0; a < m; ++a) th[a] = theta[a];
    for (int e = 0; e < m && static_cast<int>(basis.size()) < m - 1; ++e) {
      std::array<double, 3> v{0, 0, 0};
      v[e] = 1.0;
      auto project = [&](const std::array<double, 3>& u) {
        double d = 0.0;
        for (int a = 0; a < m; ++a) d += v[a] * u[a];
        for (int a = 0; a < m; ++a) v[a] -= d * u[a];
      };
      project(th);
      for (const auto& b : basis) project(b);
      double nv = 0.0;
      for (int a = 0; a < m; ++a) nv += v[a] * v[a];
      if (nv < 1e-6) continue;
      for (int a = 0; a < m; ++a) v[a] /= std::sqrt(nv);
      basis.push_back(v);
    }
  }
  double s = 0.0;
  double p[3];
  if (m == 2) {
    for (int i = -S; i <= S; ++i) {
      for (int a = 0; a < 2; ++a) p[a] = xi[a] + i * step * basis[0][a];
      s += f.interpolate(std::span<const double>(p, 2));
    }
    return s * step;
  }
  for (int i = -S; i <= S; ++i)
    for (int j = -S; j <= S; ++j) {
      for (int a = 0; a < 3; ++a) p[a] = xi[a] + i * step * basis[0][a] + j * step * basis[1][a];
      s += f.interpolate(std::span<const double>(p, 3));
    }
  return s * step * step;
}

L2BilinearCheck l2_bilinear_check(const NeighborhoodField& f, const NeighborhoodField& g, double R,
                                  const EvalOptions& options) {
  const int m = f.base_dim();
  const double h = f.lattice.h;
  auto support = [&](const NeighborhoodField& u) {
    std::vector<std::array<double, 3>> pts;
    for (const auto& e : u.entries) {
      if (e.value == cplx(0.0, 0.0)) continue;
      std::array<double, 3> p{0, 0, 0};
      for (int a = 0; a < m; ++a) p[a] = e.idx[a] * h;
      if (pts.empty() || pts.back() != p) pts.push_back(p);
    }
    return pts;
  };
  auto sf = support(f), sg = support(g);
  for (const auto& a : sf)
    for (const auto& b : sg) {
      double d2 = 0.0;
      for (int k = 0; k < m; ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
      if (d2 < 0.25) throw Error(ErrorKind::SeparationViolation, "supports must be at distance >= 0.5");
    }

  L2BilinearCheck out;
  if (sf.empty() || sg.empty()) return out;
  const NeighborhoodField* fields[] = {&f, &g};
  EvalLayout layout = make_layout(fields, R, options);
  out.lhs = product_power_integral(f, g, 2.0, layout);

  LatticeDensity df = density_from_field(f), dg = density_from_field(g);
  std::vector<double> best(sf.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t i = 0; i < sf.size(); ++i) {
    for (const auto& b : sg) {
      double th[3], nn = 0.0;
      for (int k = 0; k < m; ++k) {
        th[k] = b[k] - sf[i][k];
        nn += th[k] * th[k];
      }
      for (int k = 0; k < m; ++k) th[k] /= std::sqrt(nn);
      double v = radon_hyperplane(df, std::span<const double>(sf[i].data(), m), std::span<const double>(th, m));
      best[i] = std::max(best[i], v);
    }
  }
  for (double v : best) out.radon_sup = std::max(out.radon_sup, v);
  out.rhs = df.l1() * out.radon_sup * dg.l1() * dg.sup();
  return out;
}

DensityPair separated_density_pair(int n, double R, std::uint64_t seed) {
  Rng rng = make_rng(seed, 44);
  SurfaceGraph s = make_paraboloid(n);
  SliceLattice lat{1.0 / (2 * R), 1.0};
  std::vector<double> c1(n - 1, 0.0), c2(n - 1, 0.0);
  double r1 = uniform(rng, 0.1, 0.25), r2 = uniform(rng, 0.1, 0.25);
  double ang = n == 2 ? 0.0 : uniform(rng, 0.0, 2 * M_PI);
  double sep = uniform(rng, 0.5, 0.9) + r1 + r2;
  c1[0] = -0.5 * sep * std::cos(ang);
  c2[0] = 0.5 * sep * std::cos(ang);
  if (n >= 3) {
    c1[1] = -0.5 * sep * std::sin(ang);
    c2[1] = 0.5 * sep * std::sin(ang);
  }
  return {make_neighborhood(s, lat, c1, r1, 0.0, Profile::random_gaussian(mix_seed(seed, 1))),
          make_neighborhood(s, lat, c2, r2, 0.0, Profile::random_gaussian(mix_seed(seed, 2)))};
}

}  // namespace rlab

#include "rlab/bilinear.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rlab/error.hpp"
#include "rlab/fit.hpp"
#include "rlab/random.hpp"

namespace rlab {

namespace {

constexpr double kRegimeSlack = 1e-12;

bool le(double a, double b) { return a <= b * (1.0 + kRegimeSlack); }

// Indicator of {xi' : -half[a] <= xi'_a - c_a < half[a]} (box) or |xi' - c| < half[0]
// (ball), times slices -thickness/2 <= t < thickness/2. Half-open intervals keep the
// lattice point count proportional to the extent.
NeighborhoodField indicator_field(const SurfaceGraph& s, const SliceLattice& lat, const std::vector<double>& c,
                                  const std::vector<double>& half, bool ball, double thickness, double width) {
  const int m = s.base_dim();
  NeighborhoodField f;
  f.surface = s;
  f.lattice = lat;
  f.width = width;
  f.base_region = {c, ball ? half[0] : *std::max_element(half.begin(), half.end())};
  const int jlo = static_cast<int>(std::ceil(-0.5 * thickness / lat.dt - 1e-9));
  const int jhi = static_cast<int>(std::ceil(0.5 * thickness / lat.dt - 1e-9)) - 1;
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < m; ++a) {
    double r = ball ? half[0] : half[a];
    lo[a] = static_cast<int>(std::ceil((c[a] - r) / lat.h - 1e-9));
    hi[a] = static_cast<int>(std::ceil((c[a] + r) / lat.h - 1e-9)) - 1;
  }
  std::array<int, 3> idx = lo;
  while (true) {
    bool inside = true;
    if (ball) {
      double r2 = 0.0;
      for (int a = 0; a < m; ++a) r2 += std::pow(idx[a] * lat.h - c[a], 2);
      inside = m == 1 || r2 < half[0] * half[0] * (1.0 - 1e-12);
    }
    if (inside)
      for (int j = jlo; j <= jhi; ++j) f.entries.push_back({idx, j, cplx(1.0, 0.0)});
    int a = 0;
    while (a < m && ++idx[a] > hi[a]) {
      idx[a] = lo[a];
      ++a;
    }
    if (a == m) break;
  }
  require(!f.entries.empty(), ErrorKind::ResolutionLoss, "construction contains no lattice point");
  normalize_entries(f.entries);
  return f;
}

// Translate of f's frequency support by (a', Phi(c2) - Phi(c1)); slices are
// re-read relative to the graph over the new base point and kept within nu.
NeighborhoodField translate_field(const NeighborhoodField& f, const std::vector<double>& c1,
                                  const std::vector<double>& c2, double nu) {
  const int m = f.base_dim();
  const double h = f.lattice.h, dt = f.lattice.dt;
  std::array<int, 3> shift{0, 0, 0};
  for (int a = 0; a < m; ++a) shift[a] = static_cast<int>(std::lround((c2[a] - c1[a]) / h));
  const double an = surface_phi(f.surface, c2) - surface_phi(f.surface, c1);
  NeighborhoodField g = f;
  g.width = nu;
  g.base_region.center = c2;
  g.entries.clear();
  for (const auto& e : f.entries) {
    SliceEntry t = e;
    double xi[3], xs[3];
    for (int a = 0; a < m; ++a) {
      t.idx[a] = e.idx[a] + shift[a];
      xi[a] = e.idx[a] * h;
      xs[a] = t.idx[a] * h;
    }
    double s = surface_phi(f.surface, std::span<const double>(xi, m)) + e.slice * dt + an -
               surface_phi(f.surface, std::span<const double>(xs, m));
    t.slice = static_cast<int>(std::lround(s / dt));
    if (std::abs(t.slice) * dt <= nu * (1.0 + 1e-9)) g.entries.push_back(t);
  }
  normalize_entries(g.entries);
  return g;
}

}  // namespace

SliceLattice experiment_lattice(double mu) {
  require(mu > 0.0 && mu <= 1.0, ErrorKind::InvalidArgument, "mu must lie in (0, 1]");
  return {0.5 * mu, 0.25 * mu};
}

double bilinear_ratio(const NeighborhoodField& f, const NeighborhoodField& g, double p_prime,
                      std::optional<double> region, const EvalOptions& options) {
  require(p_prime >= 1.0 && p_prime <= 2.0, ErrorKind::InvalidArgument, "p' must lie in [1, 2]");
  const double nf = spectral_norm(f), ng = spectral_norm(g);
  if (!(nf > 0.0) || !(ng > 0.0)) throw Error(ErrorKind::ZeroDenominator, "bilinear ratio of a zero field");
  const NeighborhoodField* fields[] = {&f, &g};
  EvalLayout layout = make_layout(fields, region, options);
  double integral = product_power_integral(f, g, p_prime, layout);
  return std::pow(integral, 1.0 / p_prime) / (nf * ng);
}

const char* to_string(Construction c) {
  switch (c) {
    case Construction::random: return "random";
    case Construction::translated_cap: return "translated-cap";
    case Construction::narrow_translated_cap: return "narrow-translated-cap";
    case Construction::squashed_cap: return "squashed-cap";
    case Construction::colocated_cap: return "colocated-cap";
  }
  return "?";
}

std::vector<double> first_cap_center(int n) {
  std::vector<double> c(n - 1, 0.0);
  c[0] = -0.5;
  return c;
}

std::vector<double> second_cap_center(int n) {
  std::vector<double> c(n - 1, 0.0);
  c[0] = 0.5;
  return c;
}

FieldPair extremal_pair(const SurfaceGraph& surface, Construction kind, double mu, double nu,
                        std::optional<SliceLattice> lattice) {
  require(mu > 0.0 && nu > 0.0, ErrorKind::InvalidArgument, "widths must be positive");
  const int n = surface.ambient_dim, m = n - 1;
  const SliceLattice lat = lattice ? *lattice : experiment_lattice(mu);
  const auto c1 = first_cap_center(n), c2 = second_cap_center(n);
  const double smu = std::sqrt(mu);
  FieldPair out;
  out.kind = kind;
  switch (kind) {
    case Construction::translated_cap:
      if (!le(smu, nu)) throw Error(ErrorKind::RegimeViolation, "full-size translated caps need mu^{1/2} <= nu");
      out.f = indicator_field(surface, lat, c1, {0.5 * smu}, true, mu, mu);
      out.g = translate_field(out.f, c1, c2, nu);
      break;
    case Construction::narrow_translated_cap:
      if (!le(mu, nu) || !le(nu, smu))
        throw Error(ErrorKind::RegimeViolation, "narrow translated caps need mu <= nu <= mu^{1/2}");
      out.f = indicator_field(surface, lat, c1, {0.5 * nu}, true, mu, mu);
      out.g = translate_field(out.f, c1, c2, nu);
      break;
    case Construction::squashed_cap: {
      if (n < 3) throw Error(ErrorKind::RegimeViolation, "squashed caps need n >= 3");
      if (!le(mu, nu) || !le(nu, smu))
        throw Error(ErrorKind::RegimeViolation, "squashed caps need mu <= nu <= mu^{1/2}");
      std::vector<double> half(m, 0.5 * smu);
      half[0] = 0.5 * nu;
      out.f = indicator_field(surface, lat, c1, half, false, mu, mu);
      out.g = translate_field(out.f, c1, c2, nu);
      break;
    }
    case Construction::colocated_cap:
      if (!le(mu, nu)) throw Error(ErrorKind::RegimeViolation, "co-located caps need mu <= nu");
      out.f = indicator_field(surface, lat, c1, {0.5 * smu}, true, mu, mu);
      out.g = out.f;
      out.g.width = nu;
      break;
    case Construction::random:
      throw Error(ErrorKind::InvalidArgument, "use random_pair for random candidates");
  }
  return out;
}

FieldPair random_pair(const SurfaceGraph& surface, double mu, double nu, std::uint64_t seed, double cap_radius,
                      std::optional<SliceLattice> lattice) {
  const int n = surface.ambient_dim;
  const SliceLattice lat = lattice ? *lattice : experiment_lattice(mu);
  FieldPair out;
  out.kind = Construction::random;
  out.f = make_neighborhood(surface, lat, first_cap_center(n), cap_radius, mu, Profile::random_gaussian(mix_seed(seed, 1)));
  out.g = make_neighborhood(surface, lat, second_cap_center(n), cap_radius, nu, Profile::random_gaussian(mix_seed(seed, 2)));
  return out;
}

KEstimate k_estimate_and_fit(const SurfaceGraph& surface, double p_prime, const std::vector<double>& mu_list,
                             const std::vector<double>& nu_list, int candidates, std::uint64_t seed,
                             const KEstimateOptions& options) {
  std::set<double> mus(mu_list.begin(), mu_list.end()), nus(nu_list.begin(), nu_list.end());
  if (mus.size() < 4 || nus.size() < 4)
    throw Error(ErrorKind::InsufficientLevels, "k_estimate_and_fit needs at least 4 levels of mu and of nu");
  require(candidates >= 0, ErrorKind::InvalidArgument, "candidate count must be non-negative");
  const int n = surface.ambient_dim;
  KEstimate out;
  std::uint64_t cell = 0;
  for (double mu : mus) {
    for (double nu : nus) {
      bool admissible = options.regime == Regime::bilinear ? le(mu, nu) && le(nu, std::sqrt(mu))
                                                           : le(std::sqrt(mu), nu);
      if (!admissible) continue;
      ++cell;
      std::vector<Construction> kinds;
      if (options.regime == Regime::tomas_stein) {
        kinds.push_back(Construction::translated_cap);
      } else {
        kinds.push_back(Construction::narrow_translated_cap);
        if (n >= 3) kinds.push_back(Construction::squashed_cap);
        if (le(std::sqrt(mu), nu)) kinds.push_back(Construction::translated_cap);
      }
      const double R = experiment_radius(mu);
      BilinearDatum best;
      best.ratio = -1.0;
      auto record = [&](const FieldPair& pair) {
        BilinearDatum d{n, to_string(surface.kind), p_prime, mu, nu, pair.kind,
                        bilinear_ratio(pair.f, pair.g, p_prime, R, options.eval)};
        out.rows.push_back(d);
        if (d.ratio > best.ratio) best = d;
      };
      for (Construction k : kinds) record(extremal_pair(surface, k, mu, nu));
      for (int c = 0; c < candidates; ++c)
        record(random_pair(surface, mu, nu, mix_seed(mix_seed(seed, cell), c), options.cap_radius));
      out.cell_max.push_back(best);
    }
  }
  if (out.cell_max.size() < 3)
    throw Error(ErrorKind::InsufficientLevels, "fewer than 3 admissible (mu, nu) cells");
  Eigen::MatrixXd X(out.cell_max.size(), 2);
  Eigen::VectorXd y(out.cell_max.size());
  for (std::size_t i = 0; i < out.cell_max.size(); ++i) {
    X(i, 0) = std::log(out.cell_max[i].mu);
    X(i, 1) = std::log(out.cell_max[i].nu);
    y(i) = std::log(out.cell_max[i].ratio);
  }
  LinearFit fit = fit_linear(X, y);
  out.intercept = fit.coef(0);
  out.e_mu = fit.coef(1);
  out.e_nu = fit.coef(2);
  out.r2 = fit.r2;
  return out;
}

NeighborhoodField parabolic_rescale(const NeighborhoodField& f, double rho) {
  require(rho > 0.0 && rho <= 1.0, ErrorKind::InvalidArgument, "rho must lie in (0, 1]");
  NeighborhoodField r = f;
  r.surface = rescaled(f.surface, rho);
  r.lattice = {f.lattice.h / rho, f.lattice.dt / (rho * rho)};
  r.width = f.width / (rho * rho);
  r.base_region.radius = f.base_region.radius / rho;
  for (auto& c : r.base_region.center) c /= rho;
  if (r.base_region.radius > 0.0 && r.base_region.radius < 2.0 * r.lattice.h)
    throw Error(ErrorKind::ResolutionLoss, "rescaled cap spans fewer than two lattice spacings");
  return r;
}

EvalOptions rescaled_options(const EvalOptions& options, double rho) {
  return {options.dx * rho, options.dxn * rho * rho};
}

double rescale_norm_factor(double rho, int n, double p_prime) {
  return std::pow(rho, 2.0 * (n + 1) - (n + 1) / p_prime);
}

}  // namespace rlab

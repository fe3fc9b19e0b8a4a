#include "rlab/xb.hpp"

#include <cmath>

#include "rlab/error.hpp"
#include "rlab/kernels.hpp"
#include "rlab/random.hpp"
#include "rlab/rotation.hpp"

namespace rlab {

namespace {

constexpr double kLowCutoffRadius = 0.1;
constexpr double kSingularRelTol = 1e-12;

double sigma_or_default(const std::optional<double>& sigma, const PhaseVector& z) {
  double s = sigma.value_or(z.modulus());
  require(s > 0.0, ErrorKind::InvalidArgument, "sigma must be positive");
  return s;
}

Field with_multiplier_table(const Field& u, const std::vector<double>& m) {
  Field f = to_frequency(u);
  for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] *= m[k];
  return u.rep == Representation::physical ? to_physical(f) : f;
}

// Throws if u_hat charges lattice points where |p| < guard.
void check_guard(const Field& uhat, const std::vector<cplx>& p, double guard) {
  double mx = max_abs(uhat);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (std::abs(p[k]) < guard && std::abs(uhat.values[k]) > kSingularRelTol * mx)
      throw Error(ErrorKind::NearCharacteristicSingularity,
                  "field charges a lattice point with |p_zeta| below the guard");
  }
}

std::vector<cplx> random_vector(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  Rng rng = make_rng(seed, stream);
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(gaussian(rng), gaussian(rng));
  return v;
}

double norm2(const std::vector<cplx>& v) { return std::sqrt(kernels::weighted_mass(v, {})); }

}  // namespace

PhaseVector make_phase(const Eigen::MatrixXd& rotation, double tau) {
  require(rotation.rows() == rotation.cols() && rotation.rows() >= 2, ErrorKind::InvalidArgument,
          "rotation must be square with d >= 2");
  double err = (rotation.transpose() * rotation - Eigen::MatrixXd::Identity(rotation.rows(), rotation.cols()))
                   .cwiseAbs()
                   .maxCoeff();
  require(err <= 1e-12, ErrorKind::InvalidArgument, "rotation is not orthogonal");
  require(tau > 0.0, ErrorKind::InvalidArgument, "tau must be positive");
  return PhaseVector{rotation, tau};
}

PhaseVector identity_phase(int d, double tau) { return make_phase(Eigen::MatrixXd::Identity(d, d), tau); }

cplx zeta_dot_zeta(const PhaseVector& z) {
  Eigen::VectorXd re = z.zeta_re(), im = z.zeta_im();
  return cplx(re.dot(re) - im.dot(im), 2.0 * re.dot(im));
}

cplx symbol_p(std::span<const double> xi, const PhaseVector& z) {
  const int d = z.dim();
  double xx = 0.0, a = 0.0, b = 0.0;
  for (int i = 0; i < d; ++i) {
    xx += xi[i] * xi[i];
    a += z.tau * z.rotation(i, 0) * xi[i];
    b += -z.tau * z.rotation(i, 1) * xi[i];
  }
  // 2 i (a + i b) = -2 b + 2 i a
  return cplx(-xx - 2.0 * b, 2.0 * a);
}

double dist_to_sigma(std::span<const double> xi, const PhaseVector& z) {
  const int d = z.dim();
  double a = 0.0;
  for (int i = 0; i < d; ++i) a += z.rotation(i, 0) * xi[i];
  double r2 = 0.0;
  for (int i = 0; i < d; ++i) {
    double c = xi[i] - a * z.rotation(i, 0) - z.tau * z.rotation(i, 1);
    r2 += c * c;
  }
  double radial = std::sqrt(r2) - z.tau;
  return std::sqrt(a * a + radial * radial);
}

std::optional<double> symbol_ratio_sample(std::uint64_t seed, std::uint64_t k) {
  Rng rng = make_rng(seed, k);
  const int d = 3 + static_cast<int>(k % 3);
  PhaseVector z = make_phase(haar_rotation(mix_seed(seed, k), d), uniform(rng, 1.0, 64.0));
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  for (int i = 1; i < d; ++i) theta += gaussian(rng) * z.rotation.col(i);
  theta.normalize();
  Eigen::VectorXd offset(d);
  for (int i = 0; i < d; ++i) offset(i) = gaussian(rng);
  offset *= uniform(rng, 1e-6, 0.1) * z.tau / offset.norm();
  Eigen::VectorXd xi = z.tau * z.rotation.col(1) + z.tau * theta + offset;
  std::span<const double> sx(xi.data(), d);
  double dist = dist_to_sigma(sx, z);
  if (dist > z.tau / 10) return std::nullopt;
  return std::abs(symbol_p(sx, z)) / (z.tau * dist);
}

std::vector<cplx> symbol_table(const FourierGrid& grid, const PhaseVector& z) {
  require(grid.dim == z.dim(), ErrorKind::InvalidArgument, "phase vector dimension does not match grid");
  std::vector<cplx> p(grid.size());
  std::vector<double> xi(grid.dim);
  for (std::size_t k = 0; k < p.size(); ++k) {
    grid.frequency(k, xi);
    p[k] = symbol_p(xi, z);
  }
  return p;
}

std::vector<double> dist_table(const FourierGrid& grid, const PhaseVector& z) {
  require(grid.dim == z.dim(), ErrorKind::InvalidArgument, "phase vector dimension does not match grid");
  std::vector<double> d(grid.size());
  std::vector<double> xi(grid.dim);
  for (std::size_t k = 0; k < d.size(); ++k) {
    grid.frequency(k, xi);
    d[k] = dist_to_sigma(xi, z);
  }
  return d;
}

double xb_norm(const Field& u, const PhaseVector& z, const XbNormSpec& spec) {
  Field uh = to_frequency(u);
  std::vector<cplx> p = symbol_table(u.grid, z);
  std::vector<double> w(p.size());
  if (spec.mode == NormMode::homogeneous) {
    if (spec.b < 0.0) check_guard(uh, p, kGuardFraction * z.tau * z.tau);
    double guard = kGuardFraction * z.tau * z.tau;
    for (std::size_t k = 0; k < p.size(); ++k) {
      double a = std::abs(p[k]);
      w[k] = (spec.b < 0.0 && a < guard) ? 0.0 : std::pow(a, 2.0 * spec.b);
    }
  } else {
    double sigma = sigma_or_default(spec.sigma, z);
    for (std::size_t k = 0; k < p.size(); ++k) w[k] = std::pow(std::abs(p[k]) + sigma, 2.0 * spec.b);
  }
  return std::sqrt(kernels::weighted_mass(uh.values, w) * u.grid.cell_volume());
}

Field inv_delta_zeta(const Field& f, const PhaseVector& z, const InverseMode& mode) {
  Field fh = to_frequency(f);
  std::vector<cplx> p = symbol_table(f.grid, z);
  double floor = mode.regularized ? mode.floor : kGuardFraction * z.tau * z.tau;
  if (!mode.regularized) check_guard(fh, p, floor);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (std::abs(p[k]) < floor || p[k] == cplx(0.0, 0.0))
      fh.values[k] = 0.0;
    else
      fh.values[k] /= p[k];
  }
  return f.rep == Representation::physical ? to_physical(fh) : fh;
}

Field apply_delta_zeta(const Field& u, const PhaseVector& z) {
  Field uh = to_frequency(u);
  std::vector<cplx> p = symbol_table(u.grid, z);
  kernels::multiply_inplace(uh.values, p);
  return u.rep == Representation::physical ? to_physical(uh) : uh;
}

QSplit q_split(const Field& u, const PhaseVector& z) {
  std::vector<double> d = dist_table(u.grid, z);
  std::vector<double> m(d.size());
  for (std::size_t k = 0; k < d.size(); ++k)
    m[k] = bump_shape(BumpKind::smooth_exponential, d[k] / (z.tau * kLowCutoffRadius));
  Field low = with_multiplier_table(u, m);
  Field high = subtract(u, low);
  return {low, high};
}

namespace {

Field char_multiplier(const Field& u, const PhaseVector& z, const std::function<double(double)>& fn) {
  std::vector<double> d = dist_table(u.grid, z);
  std::vector<double> m(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) m[k] = fn(d[k] / z.tau);
  return with_multiplier_table(u, m);
}

}  // namespace

Field dyadic_char_projection(const Field& u, const PhaseVector& z, double mu) {
  require(mu > 0.0, ErrorKind::InvalidArgument, "mu must be positive");
  return char_multiplier(u, z, [mu](double s) { return smooth_step(s / mu) - smooth_step(2.0 * s / mu); });
}

Field characteristic_part(const Field& u, const PhaseVector& z, double mu_top) {
  return char_multiplier(u, z, [mu_top](double s) { return smooth_step(s / mu_top); });
}

Field dyadic_low_cap(const Field& u, const PhaseVector& z, double mu_min) {
  return char_multiplier(u, z, [mu_min](double s) { return smooth_step(2.0 * s / mu_min); });
}

std::vector<DyadicLevel> dyadic_decomposition(const Field& u, const PhaseVector& z, double mu_top, double mu_min) {
  require(mu_min > 0.0 && mu_min <= mu_top, ErrorKind::InvalidArgument, "need 0 < mu_min <= mu_top");
  std::vector<DyadicLevel> levels;
  double mu = mu_top;
  while (mu >= mu_min * (1.0 - 1e-12)) {
    levels.push_back({mu, dyadic_char_projection(u, z, mu)});
    mu *= 0.5;
  }
  double last = levels.back().mu;
  levels.back().part = add(levels.back().part, dyadic_low_cap(u, z, last));
  return levels;
}

namespace {

constexpr int kArcSamples = 17;

void arc_points(double phi, double rho, std::vector<std::array<double, 2>>& pts) {
  pts.clear();
  for (int i = 0; i < kArcSamples; ++i) {
    double t = phi - 0.5 * rho + rho * i / (kArcSamples - 1);
    pts.push_back({std::cos(t), std::sin(t)});
  }
}

double angle_between(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * M_PI);
  return d > M_PI ? 2.0 * M_PI - d : d;
}

std::vector<double> cap_centres(double rho) {
  int count = static_cast<int>(std::lround(2.0 * M_PI / rho));
  std::vector<double> c(count);
  for (int k = 0; k < count; ++k) c[k] = 2.0 * M_PI * k / count;
  return c;
}

}  // namespace

double cap_pair_cutoff(std::span<const double> xi, const CapPair& pair) {
  std::vector<std::array<double, 2>> ck, ckp;
  arc_points(pair.phi_k, pair.rho, ck);
  arc_points(pair.phi_kp, pair.rho, ckp);
  double best = INFINITY;
  for (const auto& a : ck)
    for (const auto& b : ckp) {
      double d1 = xi[1] - (b[0] - a[0]);
      double d2 = xi[2] - (b[1] - a[1]);
      best = std::min(best, d1 * d1 + d2 * d2);
    }
  double in_plane = std::sqrt(best + xi[0] * xi[0]);
  double w = pair.mu + pair.nu + pair.rho / (kArcSamples - 1);
  return smooth_step(in_plane / w);
}

std::vector<CapPair> antipodal_cap_pairs(double rho, double mu, double nu) {
  std::vector<double> c = cap_centres(rho);
  std::vector<CapPair> pairs;
  for (double a : c)
    for (double b : c) {
      double ang = angle_between(b, a + M_PI);
      if (ang >= 0.5 * rho - 1e-12 && ang <= 4.0 * rho + 1e-12) pairs.push_back({a, b, rho, mu, nu});
    }
  return pairs;
}

std::vector<CapPair> neighbour_cap_pairs(double rho, double mu, double nu) {
  std::vector<double> c = cap_centres(rho);
  std::vector<CapPair> pairs;
  for (double a : c)
    for (double b : c) {
      double ang = angle_between(a, b);
      if (ang >= 0.5 * rho - 1e-12 && ang <= 4.0 * rho + 1e-12) pairs.push_back({a, b, rho, mu, nu});
    }
  return pairs;
}

double band_multiplier(std::span<const double> xi, const Eigen::MatrixXd& U, double lambda, double nu,
                       const BandOptions& options) {
  const int d = static_cast<int>(U.rows());
  double r2 = 0.0, a = 0.0;
  for (int i = 0; i < d; ++i) {
    r2 += xi[i] * xi[i];
    a += U(i, 0) * xi[i];
  }
  double r = std::sqrt(r2);
  a = std::abs(a);
  if (options.sharp) return (r >= 0.5 * lambda && r <= 2.0 * lambda && a <= 2.0 * nu) ? 1.0 : 0.0;
  double ann = smooth_step(r / (2.0 * lambda)) * (1.0 - smooth_step(4.0 * r / lambda));
  return ann * smooth_step(a / (2.0 * nu));
}

Field freq_band_projection(const Field& f, const Eigen::MatrixXd& U, double lambda, double nu, const CapPair* refine,
                           double tau, const BandOptions& options) {
  require(lambda > 0.0 && nu > 0.0, ErrorKind::InvalidArgument, "band scales must be positive");
  require(U.rows() == f.grid.dim, ErrorKind::InvalidArgument, "rotation dimension does not match grid");
  require(refine == nullptr || f.grid.dim == 3, ErrorKind::InvalidArgument, "cap refinement is implemented for d = 3");
  Eigen::MatrixXd Ut = U.transpose();
  return apply_multiplier(f, [&](std::span<const double> xi) {
    double m = band_multiplier(xi, U, lambda, nu, options);
    if (refine != nullptr && m != 0.0) {
      Eigen::Vector3d v(xi[0], xi[1], xi[2]);
      Eigen::Vector3d w = Ut * v / tau;
      double wn[3] = {w(0), w(1), w(2)};
      m *= cap_pair_cutoff(wn, *refine);
    }
    return cplx(m, 0.0);
  });
}

OperatorNorm largest_singular_value(const LinearMap& A, const LinearMap& A_adjoint, std::size_t n,
                                    const PowerIterationOptions& options) {
  OperatorNorm best;
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    std::vector<cplx> v = random_vector(n, options.seed, 0x504f574552ULL + static_cast<std::uint64_t>(r));
    double nv = norm2(v);
    for (auto& x : v) x /= nv;
    OperatorNorm run;
    double prev = -1.0;
    for (int it = 1; it <= options.iters; ++it) {
      std::vector<cplx> av = A(v);
      double est = norm2(av);
      run.iterations = it;
      run.value = est;
      if (est == 0.0) {
        run.converged = true;
        break;
      }
      if (prev >= 0.0 && std::abs(est - prev) <= options.tol * est) {
        run.converged = true;
        break;
      }
      prev = est;
      std::vector<cplx> w = A_adjoint(av);
      double nw = norm2(w);
      if (nw == 0.0) {
        run.converged = true;
        break;
      }
      for (std::size_t k = 0; k < n; ++k) v[k] = w[k] / nw;
    }
    if (r == 0 || run.value > best.value) best = run;
  }
  return best;
}

namespace {

struct WeightedMultiplication {
  Field g;
  Field g_conj;
  std::vector<double> winv_sqrt;

  std::vector<cplx> apply(const std::vector<cplx>& x, bool adjoint) const {
    Field f = zeros(g.grid, Representation::frequency);
    for (std::size_t k = 0; k < x.size(); ++k) f.values[k] = winv_sqrt[k] * x[k];
    Field phys = to_physical(f);
    const Field& m = adjoint ? g_conj : g;
    kernels::multiply_inplace(phys.values, m.values);
    Field out = to_frequency(phys);
    for (std::size_t k = 0; k < x.size(); ++k) out.values[k] *= winv_sqrt[k];
    return std::move(out.values);
  }
};

WeightedMultiplication make_weighted(const Field& g, const PhaseVector& z, std::optional<double> sigma) {
  require(g.rep == Representation::physical, ErrorKind::InvalidArgument, "multiplier must be physical");
  for (const auto& v : g.values)
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorKind::NonFinite, "multiplier contains NaN");
  double s = sigma_or_default(sigma, z);
  std::vector<cplx> p = symbol_table(g.grid, z);
  WeightedMultiplication wm{g, conjugate(g), std::vector<double>(p.size())};
  for (std::size_t k = 0; k < p.size(); ++k) wm.winv_sqrt[k] = 1.0 / std::sqrt(std::abs(p[k]) + s);
  return wm;
}

}  // namespace

OperatorNorm mult_operator_norm(const Field& g, const PhaseVector& z, const PowerIterationOptions& options,
                                std::optional<double> sigma) {
  WeightedMultiplication wm = make_weighted(g, z, sigma);
  return largest_singular_value([&](const std::vector<cplx>& x) { return wm.apply(x, false); },
                                [&](const std::vector<cplx>& x) { return wm.apply(x, true); }, g.values.size(),
                                options);
}

Eigen::MatrixXcd mult_operator_matrix(const Field& g, const PhaseVector& z, std::optional<double> sigma) {
  WeightedMultiplication wm = make_weighted(g, z, sigma);
  std::size_t n = g.values.size();
  require(n <= 4096, ErrorKind::MemoryCap, "dense operator matrix limited to 4096 unknowns");
  Eigen::MatrixXcd M(n, n);
  std::vector<cplx> e(n, cplx(0.0, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    std::vector<cplx> col = wm.apply(e, false);
    for (std::size_t i = 0; i < n; ++i) M(i, j) = col[i];
    e[j] = 0.0;
  }
  return M;
}

OperatorNorm delta_inverse_norm(const FourierGrid& grid, const PhaseVector& z, const PowerIterationOptions& options) {
  std::vector<cplx> p = symbol_table(grid, z);
  double guard = kGuardFraction * z.tau * z.tau;
  std::vector<double> root(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) root[k] = std::abs(p[k]) < guard ? 0.0 : std::sqrt(std::abs(p[k]));
  auto forward = [&](const std::vector<cplx>& x) {
    Field f = zeros(grid, Representation::frequency);
    for (std::size_t k = 0; k < x.size(); ++k) f.values[k] = root[k] * x[k];
    Field h = to_frequency(inv_delta_zeta(to_physical(f), z, InverseMode::homogeneous()));
    for (std::size_t k = 0; k < x.size(); ++k) h.values[k] *= root[k];
    return std::move(h.values);
  };
  auto adjoint = [&](const std::vector<cplx>& y) {
    std::vector<cplx> x(y.size());
    for (std::size_t k = 0; k < y.size(); ++k)
      x[k] = root[k] == 0.0 ? cplx(0.0, 0.0) : root[k] * root[k] * y[k] / std::conj(p[k]);
    return x;
  };
  return largest_singular_value(forward, adjoint, p.size(), options);
}

}  // namespace rlab

#include "rlab/surface.hpp"

#include <cmath>

#include "rlab/error.hpp"
#include "rlab/random.hpp"

namespace rlab {

namespace {

double norm2(std::span<const double> xi) {
  double s = 0.0;
  for (double v : xi) s += v * v;
  return s;
}

void check_domain(const SurfaceGraph& s, std::span<const double> xi) {
  require(static_cast<int>(xi.size()) == s.base_dim(), ErrorKind::InvalidArgument, "point dimension mismatch");
  double r = std::sqrt(norm2(xi)) * s.scale;
  if (r > s.domain_radius * (1.0 + 1e-12))
    throw Error(ErrorKind::DomainViolation, "point outside the surface domain");
}

// Value, gradient and Hessian of the unscaled Phi at y.
void base_eval(const SurfaceGraph& s, const Eigen::VectorXd& y, double* phi, Eigen::VectorXd* grad,
               Eigen::MatrixXd* hess) {
  const int m = s.base_dim();
  double r2 = y.squaredNorm();
  switch (s.kind) {
    case SurfaceKind::paraboloid:
    case SurfaceKind::elliptic:
      if (phi) *phi = 0.5 * r2;
      if (grad) *grad = y;
      if (hess) *hess = Eigen::MatrixXd::Identity(m, m);
      break;
    case SurfaceKind::hemisphere: {
      double w = std::sqrt(1.0 - r2);
      if (phi) *phi = 1.0 - w;
      if (grad) *grad = y / w;
      if (hess) *hess = Eigen::MatrixXd::Identity(m, m) / w + y * y.transpose() / (w * w * w);
      break;
    }
  }
  if (s.kind != SurfaceKind::elliptic) return;
  for (const auto& md : s.modes) {
    Eigen::Map<const Eigen::VectorXd> k(md.k.data(), m);
    double arg = k.dot(y) + md.phase;
    if (phi) *phi += md.amplitude * (std::cos(arg) - std::cos(md.phase) + std::sin(md.phase) * k.dot(y));
    if (grad) *grad += md.amplitude * (-std::sin(arg) + std::sin(md.phase)) * k;
    if (hess) *hess += -md.amplitude * std::cos(arg) * k * k.transpose();
  }
}

}  // namespace

const char* to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::paraboloid: return "paraboloid";
    case SurfaceKind::hemisphere: return "hemisphere";
    case SurfaceKind::elliptic: return "elliptic";
  }
  return "?";
}

SurfaceGraph make_paraboloid(int n, double domain_radius) {
  require(n >= 2 && n <= 4, ErrorKind::InvalidArgument, "ambient dimension must be 2, 3 or 4");
  require(domain_radius > 0.0, ErrorKind::InvalidArgument, "domain radius must be positive");
  SurfaceGraph s;
  s.kind = SurfaceKind::paraboloid;
  s.ambient_dim = n;
  s.domain_radius = domain_radius;
  return s;
}

SurfaceGraph make_hemisphere(int n, double domain_radius) {
  SurfaceGraph s = make_paraboloid(n, domain_radius);
  if (domain_radius >= kHemisphereMaxRadius)
    throw Error(ErrorKind::DomainViolation, "hemisphere domain radius must stay below 1/sqrt(2) + 1/10");
  s.kind = SurfaceKind::hemisphere;
  return s;
}

SurfaceGraph make_elliptic(int n, double epsilon, std::uint64_t seed, double domain_radius) {
  require(epsilon >= 0.0 && epsilon < 1.0, ErrorKind::InvalidArgument, "epsilon must lie in [0, 1)");
  SurfaceGraph s = make_paraboloid(n, domain_radius);
  s.kind = SurfaceKind::elliptic;
  s.epsilon = epsilon;
  s.seed = seed;
  Rng rng = make_rng(seed, 0x5eed);
  int count = 1 + static_cast<int>(rng() % 3);
  double total = 0.0;
  for (int j = 0; j < count; ++j) {
    PerturbationMode md;
    md.k.resize(n - 1);
    double k2 = 0.0;
    for (auto& v : md.k) {
      v = uniform(rng, -3.0, 3.0);
      k2 += v * v;
    }
    md.amplitude = uniform(rng, -1.0, 1.0);
    md.phase = uniform(rng, 0.0, 2.0 * M_PI);
    total += std::abs(md.amplitude) * k2;
    s.modes.push_back(md);
  }
  for (auto& md : s.modes) md.amplitude *= total > 0.0 ? epsilon / total : 0.0;
  return s;
}

SurfaceGraph rescaled(const SurfaceGraph& s, double rho) {
  require(rho > 0.0 && rho <= 1.0, ErrorKind::InvalidArgument, "rescaling factor must lie in (0, 1]");
  SurfaceGraph r = s;
  r.scale = s.scale * rho;
  return r;
}

double surface_phi(const SurfaceGraph& s, std::span<const double> xi) {
  check_domain(s, xi);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(xi.data(), xi.size()) * s.scale;
  double phi = 0.0;
  base_eval(s, y, &phi, nullptr, nullptr);
  return phi / (s.scale * s.scale);
}

Eigen::VectorXd surface_gradient(const SurfaceGraph& s, std::span<const double> xi) {
  check_domain(s, xi);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(xi.data(), xi.size()) * s.scale;
  Eigen::VectorXd g;
  base_eval(s, y, nullptr, &g, nullptr);
  return g / s.scale;
}

Eigen::MatrixXd surface_hessian(const SurfaceGraph& s, std::span<const double> xi) {
  check_domain(s, xi);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(xi.data(), xi.size()) * s.scale;
  Eigen::MatrixXd h;
  base_eval(s, y, nullptr, nullptr, &h);
  return h;
}

std::pair<double, double> hessian_eigen_range(const SurfaceGraph& s, double spacing) {
  const int m = s.base_dim();
  const double r = s.domain_radius / s.scale;
  const int steps = static_cast<int>(std::floor(r / spacing));
  double lo = INFINITY, hi = -INFINITY;
  std::vector<int> idx(m, -steps);
  std::vector<double> xi(m);
  while (true) {
    double r2 = 0.0;
    for (int a = 0; a < m; ++a) {
      xi[a] = idx[a] * spacing;
      r2 += xi[a] * xi[a];
    }
    if (r2 <= r * r) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(surface_hessian(s, xi));
      lo = std::min(lo, es.eigenvalues().minCoeff());
      hi = std::max(hi, es.eigenvalues().maxCoeff());
    }
    int a = 0;
    while (a < m && ++idx[a] > steps) idx[a++] = -steps;
    if (a == m) break;
  }
  return {lo, hi};
}

}  // namespace rlab

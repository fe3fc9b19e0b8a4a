#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rlab {

enum class SurfaceKind { paraboloid, hemisphere, elliptic };

// One cosine mode of the elliptic perturbation.
struct PerturbationMode {
  std::vector<double> k;
  double amplitude = 0.0;
  double phase = 0.0;
};

// Graph {(xi', Phi(xi'))} over |xi'| <= domain_radius in R^n (xi' in R^{n-1}).
// `scale` rho gives the parabolic rescaling Phi_rho(xi') = rho^{-2} Phi(rho xi').
struct SurfaceGraph {
  SurfaceKind kind = SurfaceKind::paraboloid;
  int ambient_dim = 2;
  double domain_radius = 1.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::vector<PerturbationMode> modes;
  double scale = 1.0;

  int base_dim() const { return ambient_dim - 1; }
};

inline constexpr double kHemisphereMaxRadius = 0.70710678118654752 + 0.1;

// Errors: InvalidArgument (n < 2, n > 4, bad radius), DomainViolation for a
// hemisphere radius at or beyond 1/sqrt(2) + 1/10.
SurfaceGraph make_paraboloid(int n, double domain_radius = 1.0);
SurfaceGraph make_hemisphere(int n, double domain_radius = 0.75);
// 1/2 |xi'|^2 plus at most three seeded cosine modes, rescaled so that
// sum |a_m| |k_m|^2 = epsilon; the Hessian eigenvalues then lie in [1 - eps, 1 + eps].
SurfaceGraph make_elliptic(int n, double epsilon, std::uint64_t seed, double domain_radius = 1.0);
SurfaceGraph rescaled(const SurfaceGraph& s, double rho);

// Errors: DomainViolation outside the domain.
double surface_phi(const SurfaceGraph& s, std::span<const double> xi);
Eigen::VectorXd surface_gradient(const SurfaceGraph& s, std::span<const double> xi);
Eigen::MatrixXd surface_hessian(const SurfaceGraph& s, std::span<const double> xi);

// Min and max Hessian eigenvalue over a lattice of the given spacing inside the domain.
std::pair<double, double> hessian_eigen_range(const SurfaceGraph& s, double spacing);

const char* to_string(SurfaceKind kind);

}  // namespace rlab

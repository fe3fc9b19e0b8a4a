#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rlab/grid.hpp"

namespace rlab {

// zeta(U, tau) = tau (U e1 - i U e2).
struct PhaseVector {
  Eigen::MatrixXd rotation;
  double tau = 1.0;

  int dim() const { return static_cast<int>(rotation.rows()); }
  Eigen::VectorXd zeta_re() const { return tau * rotation.col(0); }
  Eigen::VectorXd zeta_im() const { return -tau * rotation.col(1); }
  double modulus() const { return std::sqrt(2.0) * tau; }
};

// Validates U^T U = I (1e-12) and d >= 2.
PhaseVector make_phase(const Eigen::MatrixXd& rotation, double tau);
PhaseVector identity_phase(int d, double tau);

// zeta . zeta with the real bilinear product (zero for every valid phase).
cplx zeta_dot_zeta(const PhaseVector& z);

// p_zeta(xi) = -|xi|^2 + 2 i zeta . xi
cplx symbol_p(std::span<const double> xi, const PhaseVector& z);
// Distance to the (d-2)-sphere of radius tau centred at tau U e2 in the plane <U e1, xi> = 0.
double dist_to_sigma(std::span<const double> xi, const PhaseVector& z);

// |p_zeta(xi)| / (tau d(xi, Sigma)) for sample k of a seeded sweep: Haar U in
// dimension 3 + k mod 3, tau uniform in [1, 64], xi a random point of Sigma plus an
// offset of length in [1e-6, 1/10] tau. Empty when the offset lands farther than
// tau/10 from Sigma.
std::optional<double> symbol_ratio_sample(std::uint64_t seed, std::uint64_t k);

// Symbol values on the frequency lattice, in storage order.
std::vector<cplx> symbol_table(const FourierGrid& grid, const PhaseVector& z);
std::vector<double> dist_table(const FourierGrid& grid, const PhaseVector& z);

inline constexpr double kGuardFraction = 1e-8;  // |p| < kGuardFraction tau^2 counts as on Sigma

enum class NormMode { homogeneous, inhomogeneous };

struct XbNormSpec {
  double b = 0.5;
  NormMode mode = NormMode::inhomogeneous;
  std::optional<double> sigma;  // inhomogeneous shift; default |zeta| = sqrt(2) tau
};

double xb_norm(const Field& u, const PhaseVector& z, const XbNormSpec& spec);

struct InverseMode {
  bool regularized = false;
  double floor = 0.0;  // regularized: coefficients with |p| < floor are zeroed
  static InverseMode homogeneous() { return {false, 0.0}; }
  static InverseMode regularized_with(double floor) { return {true, floor}; }
};

// Division by p_zeta in frequency. Homogeneous mode throws
// NearCharacteristicSingularity if the input charges the guarded set.
Field inv_delta_zeta(const Field& f, const PhaseVector& z, const InverseMode& mode);
// Delta_zeta = Delta + 2 zeta . grad, the multiplier p_zeta.
Field apply_delta_zeta(const Field& u, const PhaseVector& z);

struct QSplit {
  Field low;
  Field high;
};
// low = bump(d(xi, Sigma) / tau) u_hat with the smooth bump supported in (-1/10, 1/10); high = u - low.
QSplit q_split(const Field& u, const PhaseVector& z);

// Shell multiplier chi(s/mu) - chi(2 s/mu) in s = d(xi, Sigma)/tau, supported in (mu/2, 2 mu).
Field dyadic_char_projection(const Field& u, const PhaseVector& z, double mu);
// chi(s / mu_top) u_hat: the characteristic part the dyadic shells resolve.
Field characteristic_part(const Field& u, const PhaseVector& z, double mu_top);
// chi(2 s / mu_min) u_hat: everything closer to Sigma than the last shell.
Field dyadic_low_cap(const Field& u, const PhaseVector& z, double mu_min);

struct DyadicLevel {
  double mu;
  Field part;
};
// Shells mu = mu_top, mu_top/2, ..., mu_min; the last level absorbs the low cap,
// so the parts sum to characteristic_part(u, z, mu_top).
std::vector<DyadicLevel> dyadic_decomposition(const Field& u, const PhaseVector& z, double mu_top, double mu_min);

// Caps on the normalised characteristic sphere (tau = 1, U = I): points e2 + theta
// with theta a unit vector in span(e2, ..., ed). Only d = 3 (Sigma a circle) is
// enumerated; theta(phi) = (0, cos phi, sin phi).
struct CapPair {
  double phi_k = 0.0;
  double phi_kp = 0.0;
  double rho = 0.0;  // caps are arcs of half-width rho / 2
  double mu = 0.0;
  double nu = 0.0;
};

// Smooth cutoff of the thickened Minkowski sum -C_k + C_k' (normalised coordinates).
double cap_pair_cutoff(std::span<const double> xi_normalised, const CapPair& pair);
// Antipodal transversal pairs at scale rho: angle between theta_k' and -theta_k in [rho/2, 4 rho].
std::vector<CapPair> antipodal_cap_pairs(double rho, double mu, double nu);
// Neighbouring transversal pairs at scale rho: angle between theta_k and theta_k' in [rho/2, 4 rho].
std::vector<CapPair> neighbour_cap_pairs(double rho, double mu, double nu);

struct BandOptions {
  bool sharp = false;
};

// Smooth projection onto |xi| ~ lambda, |<U e1, xi>| <= 2 nu (absolute frequency
// scales, i.e. tau lambda and tau nu). With a cap pair, also onto its Minkowski-sum
// support, mapped by xi -> U^T xi / tau.
double band_multiplier(std::span<const double> xi, const Eigen::MatrixXd& U, double lambda, double nu,
                       const BandOptions& options = {});
Field freq_band_projection(const Field& f, const Eigen::MatrixXd& U, double lambda, double nu,
                           const CapPair* refine = nullptr, double tau = 1.0, const BandOptions& options = {});

struct PowerIterationOptions {
  int iters = 200;
  double tol = 1e-8;
  int restarts = 3;
  std::uint64_t seed = 0;
};

struct OperatorNorm {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

using LinearMap = std::function<std::vector<cplx>(const std::vector<cplx>&)>;

// Largest singular value of A via power iteration on A^* A.
OperatorNorm largest_singular_value(const LinearMap& A, const LinearMap& A_adjoint, std::size_t n,
                                    const PowerIterationOptions& options);

// ||M_g||_{X^{1/2} -> X^{-1/2}} for the inhomogeneous weight |p| + sigma.
OperatorNorm mult_operator_norm(const Field& g, const PhaseVector& z, const PowerIterationOptions& options = {},
                                std::optional<double> sigma = std::nullopt);
// Dense matrix of W^{-1/2} F M_g F^{-1} W^{-1/2}, for small grids only.
Eigen::MatrixXcd mult_operator_matrix(const Field& g, const PhaseVector& z, std::optional<double> sigma = std::nullopt);

// ||Delta_zeta^{-1}||_{dot X^{-1/2} -> dot X^{1/2}} by power iteration, routed
// through inv_delta_zeta on the unguarded part of the lattice.
OperatorNorm delta_inverse_norm(const FourierGrid& grid, const PhaseVector& z, const PowerIterationOptions& options = {});

}  // namespace rlab

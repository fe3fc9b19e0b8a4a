#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rlab/grid.hpp"
#include "rlab/xb.hpp"

namespace rlab {

// Real conductivity sampled on a grid, bounded below and equal to 1 outside
// the ball of radius L/2.
struct ConductivityField {
  Field gamma;
  double lower_bound = 0.0;
};

// Errors: PositivityViolation if a sample falls below lower_bound,
// SupportViolation if gamma differs from 1 outside radius L/2.
ConductivityField make_conductivity(const Field& gamma, double lower_bound);
// gamma = 1 + amplitude * bump(|x| / radius).
ConductivityField bump_conductivity(const FourierGrid& grid, double amplitude, double radius);

enum class PotentialForm { laplacian, divergence };

// laplacian:  gamma^{-1/2} Delta gamma^{1/2}
// divergence: (1/2) Delta log gamma + (1/4) |grad log gamma|^2
Field potential_from_conductivity(const ConductivityField& gamma, PotentialForm form);

struct NeumannReport {
  int iterations = 0;
  double residual = 0.0;
  double contraction_estimate = 0.0;
  double psi_norm = 0.0;  // homogeneous X^{1/2}
  std::vector<double> residual_history;
  std::vector<double> increment_norms;  // X^{1/2} norms of psi_k - psi_{k-1}
  double first_term_norm = 0.0;         // X^{1/2} norm of Delta_zeta^{-1} q
  std::optional<double> precheck_norm;  // mult_operator_norm(q), when requested
  std::string warning;
};

struct NeumannOptions {
  int max_iter = 200;
  double tol = 1e-8;
  bool precheck = false;
  int divergence_window = 5;
};

struct NeumannResult {
  Field psi;
  NeumannReport report;
};

// Fixed point psi <- Delta_zeta^{-1} (q (1 + psi)) on the lattice points off the
// guarded set |p| < kGuardFraction tau^2. Errors: Divergence, MaxIterExceeded.
NeumannResult neumann_solve(const Field& q, const PhaseVector& z, const NeumannOptions& options = {});

// ||Delta_zeta psi - q (1 + psi)||_{X^{-1/2}} / ||q||_{X^{-1/2}} (homogeneous
// norms, guarded lattice points excluded). Returns 0 when q vanishes and psi solves.
double conjugated_residual(const Field& psi, const Field& q, const PhaseVector& z);

// Homogeneous X^b norm restricted to the unguarded lattice points.
double unguarded_xb_norm(const Field& u, const PhaseVector& z, double b);

enum class SweepTerm { derivative, square };

struct ExpectationSample {
  Eigen::MatrixXd rotation;
  double tau = 0.0;
  double q_norm = 0.0;
  double mq_norm = 0.0;
};

struct ExpectationAggregate {
  double M = 0.0;
  int samples = 0;
  double mean_qnorm = 0.0;
  double se_qnorm = 0.0;
  double mean_mqnorm = 0.0;
  double se_mqnorm = 0.0;
};

struct ExpectationOptions {
  SweepTerm term = SweepTerm::derivative;
  PowerIterationOptions power{200, 1e-8, 3, 0};
};

struct ExpectationResult {
  std::vector<ExpectationAggregate> aggregates;
  std::vector<std::vector<ExpectationSample>> samples;  // per M
};

// For each M: (U, tau) with U Haar and tau uniform in [M, 2M]; q = d_i f (or |f|^2),
// q_norm = ||q||_{X^{-1/2}} (inhomogeneous), mq_norm = mult_operator_norm(q).
// Sample j of level m uses generator stream (m, j). Errors: SupportViolation if f
// is not supported in the unit ball, InvalidArgument if samples < 20.
ExpectationResult expectation_sweep(const Field& f, int axis, const std::vector<double>& M_list, int samples,
                                    std::uint64_t seed, const ExpectationOptions& options = {});

// Low-frequency piece g = P_{<=A} d_i f with A = M^{1/4}: operator norm of M_g and
// the comparison quantity A^2 / M * ||f||_d.
struct LowFrequencyCheck {
  double A = 0.0;
  double op_norm = 0.0;
  double sup_bound = 0.0;    // ||g||_inf / |zeta|
  double shape_bound = 0.0;  // A^2 / M * ||f||_d
};
LowFrequencyCheck low_frequency_check(const Field& f, int axis, const PhaseVector& z, double M,
                                      const PowerIterationOptions& power = {});

// u_{tau U}(x) = tau^{-d} u(tau^{-1} U x), sampled on `target` (default: same N,
// box radius tau L). Uses 4x spectral upsampling and cubic Lagrange interpolation.
// Errors: ResolutionLoss if u carries more than 1e-10 of its mass outside the
// ball inscribed in its box (that part cannot be represented after rotation).
Field scale_rotate(const Field& u, const PhaseVector& z, std::optional<FourierGrid> target = std::nullopt);

// Directional derivative w . grad u.
Field directional_derivative(const Field& u, std::span<const double> w);

}  // namespace rlab

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rlab/extension.hpp"

namespace rlab {

// Slice lattice used for a (mu, nu) cell: h = mu/2, dt = mu/4, and the ball B_R
// with R = 1/mu on which the L^{p'} norms are taken.
SliceLattice experiment_lattice(double mu);
inline double experiment_radius(double mu) { return 1.0 / mu; }

// ||Ef Eg||_{p'} / (||f||_2 ||g||_2) with spectral L^2 norms. Without a region the
// numerator runs over one period cell of the lattice.
// Errors: ZeroDenominator, InvalidArgument for p' outside [1, 2].
double bilinear_ratio(const NeighborhoodField& f, const NeighborhoodField& g, double p_prime,
                      std::optional<double> region, const EvalOptions& options = {});

enum class Construction { random, translated_cap, narrow_translated_cap, squashed_cap, colocated_cap };
const char* to_string(Construction c);

struct FieldPair {
  NeighborhoodField f, g;
  Construction kind = Construction::random;
};

// Cap centers used by all pair constructions, at distance 1 along e1.
std::vector<double> first_cap_center(int n);
std::vector<double> second_cap_center(int n);

// Indicator pairs of thickness mu (|t| <= mu/2); g is the translate of f by
// a = (c2 - c1, Phi(c2) - Phi(c1)), moved to the nearest slice.
//   translated_cap         round cap of diameter mu^{1/2}; needs mu^{1/2} <= nu
//   narrow_translated_cap  round cap of diameter nu; needs mu <= nu <= mu^{1/2}
//   squashed_cap           box nu x mu^{1/2} x ...; needs n >= 3, mu <= nu <= mu^{1/2}
//   colocated_cap          g = f on the cap of diameter mu^{1/2}; needs mu <= nu
// Errors: RegimeViolation.
FieldPair extremal_pair(const SurfaceGraph& surface, Construction kind, double mu, double nu,
                        std::optional<SliceLattice> lattice = std::nullopt);

// Gaussian profiles on caps of the given radius around the two cap centers; f fills
// the mu-neighborhood and g the nu-neighborhood.
FieldPair random_pair(const SurfaceGraph& surface, double mu, double nu, std::uint64_t seed,
                      double cap_radius = 0.25, std::optional<SliceLattice> lattice = std::nullopt);

struct BilinearDatum {
  int n = 2;
  std::string surface;
  double p_prime = 2.0;
  double mu = 0.0;
  double nu = 0.0;
  Construction construction = Construction::random;
  double ratio = 0.0;
};

enum class Regime {
  bilinear,     // mu <= nu <= mu^{1/2}
  tomas_stein,  // mu^{1/2} <= nu
};

struct KEstimateOptions {
  Regime regime = Regime::bilinear;
  EvalOptions eval;
  double cap_radius = 0.25;
};

struct KEstimate {
  std::vector<BilinearDatum> rows;      // every evaluated candidate
  std::vector<BilinearDatum> cell_max;  // one row per (mu, nu) cell
  double intercept = 0.0;
  double e_mu = 0.0;
  double e_nu = 0.0;
  double r2 = 0.0;
};

// For every admissible (mu, nu) cell: max ratio over the applicable extremal
// constructions plus `candidates` random pairs, then a least-squares fit of the
// log max against (log mu, log nu). Errors: InsufficientLevels when either list
// has fewer than 4 distinct levels or fewer than 3 cells are admissible.
KEstimate k_estimate_and_fit(const SurfaceGraph& surface, double p_prime, const std::vector<double>& mu_list,
                             const std::vector<double>& nu_list, int candidates, std::uint64_t seed,
                             const KEstimateOptions& options = {});

// Parabolic rescaling: the same entries read on the lattice (h/rho, dt/rho^2)
// over phi_rho(eta) = rho^{-2} phi(rho eta). Then Ef(x) = rho^{n+1} EF(rho x', rho^2 x_n).
// Errors: ResolutionLoss if the rescaled lattice cannot carry the cap (fewer than
// two points across it), InvalidArgument for rho outside (0, 1].
NeighborhoodField parabolic_rescale(const NeighborhoodField& f, double rho);
// Sample spacings matching `options` after rescaling by rho.
EvalOptions rescaled_options(const EvalOptions& options, double rho);
// rho^{2(n+1) - (n+1)/p'}: ||Ef Eg||_{p'} = factor * ||EF EG||_{p'}.
double rescale_norm_factor(double rho, int n, double p_prime);

}  // namespace rlab

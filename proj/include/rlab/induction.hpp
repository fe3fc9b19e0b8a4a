#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rlab/extension.hpp"
#include "rlab/lattice.hpp"

namespace rlab {

struct InductionOptions {
  EvalOptions eval;
  double cap_radius = 0.25;
};

struct InductionRow {
  double R = 0.0;
  double K = 0.0;  // max over candidates of ||E f g||_{L^{p'}(B_R)} / (||f||_{L^2(S)} ||g||_2)
  std::string candidate;
};

struct InductionResult {
  std::vector<InductionRow> rows;
  std::optional<double> exponent;  // fitted growth of K in R; absent for a single level
  std::optional<double> r2;
};

// Lattice used at scale R: h = 1/(2R), dt = min(nu/4, 1/(2R)).
SliceLattice induction_lattice(double nu, double R);

// f: surface density on the cap around -e1/2 (single slice, values scaled by 1/dt so
// that its extension is the surface extension), g: nu-neighbourhood field on the cap
// around +e1/2. Returns the ratio normalised by ||f||_{L^2(S)}.
double localized_ratio(const NeighborhoodField& f_surface, const NeighborhoodField& g, double p_prime, double R,
                       const EvalOptions& eval = {});

// Candidate 0: constant profiles; 1: f constant on a cap of radius R^{-1/2} (one
// packet); from 2 on: Gaussian profiles seeded by (seed, R index, candidate).
// Errors: InvalidArgument if some R lies outside [1/nu, 1/nu^2] or candidates < 1.
InductionResult induction_probe(const SurfaceGraph& surface, double nu, const std::vector<double>& R_list,
                                double p_prime, int candidates, std::uint64_t seed,
                                const InductionOptions& options = {});

}  // namespace rlab

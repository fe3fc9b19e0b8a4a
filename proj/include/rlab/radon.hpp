#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "rlab/extension.hpp"

namespace rlab {

// Real density on the lattice h Z^{dim}, stored on the box [lo, lo + count).
struct LatticeDensity {
  int dim = 1;
  double h = 1.0;
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> count{1, 1, 1};
  std::vector<double> values;

  double at(const std::array<int, 3>& idx) const;  // zero outside the box
  // Multilinear interpolation, zero outside the box.
  double interpolate(std::span<const double> xi) const;
  double l1() const;  // sum |v| h^dim
  double sup() const;
};

// |F| summed over slices, on the base lattice of f.
LatticeDensity density_from_field(const NeighborhoodField& f);

// Integral of f over the hyperplane {xi + eta : <eta, theta> = 0} in R^{dim}:
// point evaluation for dim 1, a line (dim 2) or plane (dim 3) quadrature with step
// h/2 otherwise. Errors: InvalidArgument unless |theta| = 1.
double radon_hyperplane(const LatticeDensity& f, std::span<const double> xi, std::span<const double> theta);

struct L2BilinearCheck {
  double lhs = 0.0;        // ||Ef Eg||^2_{L^2(B_R)}
  double rhs = 0.0;        // ||f||_1 sup R|f| ||g||_1 ||g||_inf
  double radon_sup = 0.0;  // sup over lattice pairs (xi' in supp f, xi'' in supp g)
};

// f and g are surface densities (single-slice fields, dt = 1 so the entry weight
// is h^{n-1}). The Radon transform of |f| is taken over the hyperplane through
// xi' with normal xi'' - xi'. Errors: SeparationViolation if the supports come
// closer than 0.5.
L2BilinearCheck l2_bilinear_check(const NeighborhoodField& f, const NeighborhoodField& g, double R,
                                  const EvalOptions& options = {});

struct DensityPair {
  NeighborhoodField f, g;
};

// Random separated surface densities on h = 1/(2R): cap radii in [0.1, 0.25], gap
// between the caps in [0.5, 0.9] along a random direction (e1 for n = 2), Gaussian
// profiles. Drawn from generator stream (seed, 44).
DensityPair separated_density_pair(int n, double R, std::uint64_t seed);

}  // namespace rlab

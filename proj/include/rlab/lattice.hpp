#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "rlab/surface.hpp"

namespace rlab {

using cplx = std::complex<double>;

// Frequencies xi = (idx * h, Phi(idx * h) + slice * dt): a lattice over the base
// domain times vertical shifts of the graph.
struct SliceLattice {
  double h = 0.0;
  double dt = 0.0;
};

struct SliceEntry {
  std::array<int, 3> idx{0, 0, 0};
  int slice = 0;
  cplx value;
};

struct CapRegion {
  std::vector<double> center;
  double radius = 0.0;
};

// Field whose Fourier transform lives on the shifted graphs within vertical
// distance `width` of the surface. Entries are sorted by (idx, slice).
struct NeighborhoodField {
  SurfaceGraph surface;
  SliceLattice lattice;
  double width = 0.0;
  CapRegion base_region;
  std::vector<SliceEntry> entries;

  int base_dim() const { return surface.base_dim(); }
};

struct Profile {
  enum Kind { constant, random } kind = constant;
  std::uint64_t seed = 0;

  static Profile constant_one() { return {constant, 0}; }
  static Profile random_gaussian(std::uint64_t seed) { return {random, seed}; }
};

// Lattice points with |xi' - center| <= radius and slices |t| <= width.
// Errors: ResolutionLoss if the cap radius is below two lattice spacings,
// DomainViolation if the cap leaves the surface domain.
NeighborhoodField make_neighborhood(const SurfaceGraph& surface, const SliceLattice& lattice,
                                    std::span<const double> cap_center, double cap_radius, double width,
                                    const Profile& profile);

// Sorts entries by (idx, slice) and merges duplicates.
void normalize_entries(std::vector<SliceEntry>& entries);

double base_point(const NeighborhoodField& f, const SliceEntry& e, int axis);
double entry_phi(const NeighborhoodField& f, const SliceEntry& e);  // Phi(xi') + t

// Quadrature weight h^{n-1} dt of one entry.
double cell_measure(const NeighborhoodField& f);
// sqrt(sum |F|^2 h^{n-1} dt)
double spectral_norm(const NeighborhoodField& f);
// Mass sum |F|^2 h^{n-1} dt per slice index, from min to max slice.
std::vector<double> slice_masses(const NeighborhoodField& f, int* first_slice = nullptr);

}  // namespace rlab

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rlab/lattice.hpp"

namespace rlab {

// Smooth partition of the base domain: centers on the grid s Z^{n-1} with
// s = 2 R^{-1/2}, eta_c(xi) = prod_a b((xi_a - c_a) / s) for the smooth bump b on
// (-1, 1), zeta_c = eta_c / (sum eta^2)^{1/2}. When R^{-1/2} covers the whole
// domain there is a single cap with zeta = 1.
struct CapPartition {
  int base_dim = 1;
  double R = 1.0;
  double spacing = 1.0;  // s
  double domain_radius = 1.0;
  bool single = false;
  std::vector<std::vector<double>> centers;

  double eta(std::size_t cap, std::span<const double> xi) const;
  double zeta(std::size_t cap, std::span<const double> xi) const;
  // Caps whose support contains xi.
  std::vector<std::size_t> caps_at(std::span<const double> xi) const;
};

// Errors: ResolutionLoss if R^{-1/2} is below two lattice spacings (lattice_h > 0).
CapPartition cap_partition(int base_dim, double domain_radius, double R, double lattice_h = 0.0);

// One coefficient: cap, signed Fourier index per base axis and along the slices.
struct PacketEntry {
  std::uint32_t cap = 0;
  std::array<int, 4> freq{0, 0, 0, 0};
  cplx a;
};

// Box of lattice points carrying one cap's Fourier series.
struct PacketBox {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> count{1, 1, 1};
  int slice_lo = 0;
  int slices = 1;
};

struct PacketCoefficients {
  NeighborhoodField shape;  // surface, lattice and width of the decomposed field (no entries)
  CapPartition partition;
  std::vector<PacketBox> boxes;  // per cap
  std::vector<PacketEntry> entries;

  // Frequency omega (n components; the last is the slice-direction frequency).
  std::vector<double> omega(const PacketEntry& e) const;
  double box_volume(std::uint32_t cap) const;  // |alpha| (times the slice extent)
};

// a(alpha, omega) = |alpha|^{-1/2} sum f zeta_alpha e(-<omega, xi - c_alpha> - omega_n t) h^{n-1} dt
// on the cap box, omega running over the reciprocal lattice of the box. Entries
// below 1e-12 of the largest are dropped.
PacketCoefficients wp_decompose(const NeighborhoodField& f, double R, double drop_fraction = 1e-12);

// sum a phi_T at the points (row-major, n coordinates each).
std::vector<cplx> wp_reconstruct(const PacketCoefficients& c, std::span<const double> points);

// Coefficients with |a| below fraction * max removed.
PacketCoefficients truncate(const PacketCoefficients& c, double fraction);

// The packet phi_T of one entry, evaluated directly.
std::vector<cplx> packet_field(const PacketCoefficients& c, const PacketEntry& e, std::span<const double> points);

struct PacketTube {
  std::vector<double> direction;  // unit vector along (-grad Phi(c_alpha), 1)
  std::vector<double> base;       // point of the axis at x_n = -omega_n
  double cross_radius = 0.0;      // R^{1/2}
};
PacketTube packet_tube(const PacketCoefficients& c, const PacketEntry& e);

struct DecayAudit {
  double axis_amplitude = 0.0;
  std::vector<double> distances;   // in cross radii
  std::vector<double> amplitudes;  // |phi_T| at the probes
  double exponent = 0.0;           // fitted M in |phi| ~ dist^{-M}
};

// Probes at the given multiples of the cross radius, displaced from the axis
// along a unit vector orthogonal to the tube at height x_n.
DecayAudit packet_decay_audit(const PacketCoefficients& c, const PacketEntry& e, double xn,
                              const std::vector<double>& multiples);

}  // namespace rlab

#include "rlab/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "rlab/error.hpp"
#include "rlab/random.hpp"

namespace rlab {

void normalize_entries(std::vector<SliceEntry>& entries) {
  auto key_less = [](const SliceEntry& a, const SliceEntry& b) {
    if (a.idx != b.idx) return a.idx < b.idx;
    return a.slice < b.slice;
  };
  std::sort(entries.begin(), entries.end(), key_less);
  std::vector<SliceEntry> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    if (!out.empty() && out.back().idx == e.idx && out.back().slice == e.slice)
      out.back().value += e.value;
    else
      out.push_back(e);
  }
  entries.swap(out);
}

double base_point(const NeighborhoodField& f, const SliceEntry& e, int axis) {
  return e.idx[axis] * f.lattice.h;
}

double entry_phi(const NeighborhoodField& f, const SliceEntry& e) {
  const int m = f.base_dim();
  double xi[3];
  for (int a = 0; a < m; ++a) xi[a] = e.idx[a] * f.lattice.h;
  return surface_phi(f.surface, std::span<const double>(xi, m)) + e.slice * f.lattice.dt;
}

double cell_measure(const NeighborhoodField& f) {
  return std::pow(f.lattice.h, f.base_dim()) * f.lattice.dt;
}

double spectral_norm(const NeighborhoodField& f) {
  double s = 0.0;
  for (const auto& e : f.entries) s += std::norm(e.value);
  return std::sqrt(s * cell_measure(f));
}

std::vector<double> slice_masses(const NeighborhoodField& f, int* first_slice) {
  if (f.entries.empty()) return {};
  int lo = f.entries.front().slice, hi = lo;
  for (const auto& e : f.entries) {
    lo = std::min(lo, e.slice);
    hi = std::max(hi, e.slice);
  }
  std::vector<double> mass(hi - lo + 1, 0.0);
  for (const auto& e : f.entries) mass[e.slice - lo] += std::norm(e.value) * cell_measure(f);
  if (first_slice) *first_slice = lo;
  return mass;
}

NeighborhoodField make_neighborhood(const SurfaceGraph& surface, const SliceLattice& lattice,
                                    std::span<const double> cap_center, double cap_radius, double width,
                                    const Profile& profile) {
  const int m = surface.base_dim();
  require(lattice.h > 0.0 && lattice.dt > 0.0, ErrorKind::InvalidArgument, "lattice spacings must be positive");
  require(static_cast<int>(cap_center.size()) == m, ErrorKind::InvalidArgument, "cap center dimension mismatch");
  require(width >= 0.0, ErrorKind::InvalidArgument, "width must be non-negative");
  if (cap_radius < 2.0 * lattice.h)
    throw Error(ErrorKind::ResolutionLoss, "cap radius is below two lattice spacings");
  double c2 = 0.0;
  for (double v : cap_center) c2 += v * v;
  if ((std::sqrt(c2) + cap_radius) * surface.scale > surface.domain_radius * (1.0 + 1e-12))
    throw Error(ErrorKind::DomainViolation, "cap leaves the surface domain");

  NeighborhoodField f;
  f.surface = surface;
  f.lattice = lattice;
  f.width = width;
  f.base_region = {std::vector<double>(cap_center.begin(), cap_center.end()), cap_radius};

  const int jmax = static_cast<int>(std::floor(width / lattice.dt + 1e-9));
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < m; ++a) {
    lo[a] = static_cast<int>(std::ceil((cap_center[a] - cap_radius) / lattice.h - 1e-9));
    hi[a] = static_cast<int>(std::floor((cap_center[a] + cap_radius) / lattice.h + 1e-9));
  }
  Rng rng = make_rng(profile.seed, 0xcafe);
  std::array<int, 3> idx = lo;
  while (true) {
    double r2 = 0.0;
    for (int a = 0; a < m; ++a) {
      double d = idx[a] * lattice.h - cap_center[a];
      r2 += d * d;
    }
    if (r2 <= cap_radius * cap_radius * (1.0 + 1e-12)) {
      for (int j = -jmax; j <= jmax; ++j) {
        cplx v(1.0, 0.0);
        if (profile.kind == Profile::random) {
          double re = gaussian(rng), im = gaussian(rng);
          v = cplx(re, im);
        }
        f.entries.push_back({idx, j, v});
      }
    }
    int a = 0;
    while (a < m && ++idx[a] > hi[a]) {
      idx[a] = lo[a];
      ++a;
    }
    if (a == m) break;
  }
  normalize_entries(f.entries);
  return f;
}

}  // namespace rlab

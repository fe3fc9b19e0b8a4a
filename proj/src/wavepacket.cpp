#include "rlab/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rlab/error.hpp"
#include "rlab/extension.hpp"
#include "rlab/fft.hpp"
#include "rlab/fit.hpp"
#include "rlab/grid.hpp"

namespace rlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

cplx expi(double turns) { return std::polar(1.0, kTwoPi * turns); }

int wrap(int q, int n) { return ((q % n) + n) % n; }
int signed_index(int k, int n) { return k < n - n / 2 ? k : k - n; }

}  // namespace

double CapPartition::eta(std::size_t cap, std::span<const double> xi) const {
  if (single) return 1.0;
  double v = 1.0;
  for (int a = 0; a < base_dim && v > 0.0; ++a)
    v *= bump_shape(BumpKind::smooth_exponential, (xi[a] - centers[cap][a]) / spacing);
  return v;
}

std::vector<std::size_t> CapPartition::caps_at(std::span<const double> xi) const {
  std::vector<std::size_t> out;
  if (single) {
    out.push_back(0);
    return out;
  }
  for (std::size_t c = 0; c < centers.size(); ++c) {
    bool inside = true;
    for (int a = 0; a < base_dim && inside; ++a) inside = std::abs(xi[a] - centers[c][a]) < spacing;
    if (inside) out.push_back(c);
  }
  return out;
}

double CapPartition::zeta(std::size_t cap, std::span<const double> xi) const {
  if (single) return 1.0;
  double e = eta(cap, xi);
  if (e == 0.0) return 0.0;
  double s = 0.0;
  for (auto c : caps_at(xi)) s += std::pow(eta(c, xi), 2);
  return e / std::sqrt(s);
}

CapPartition cap_partition(int base_dim, double domain_radius, double R, double lattice_h) {
  require(base_dim >= 1 && base_dim <= 3, ErrorKind::InvalidArgument, "base dimension must be 1..3");
  require(R >= 1.0 && domain_radius > 0.0, ErrorKind::InvalidArgument, "need R >= 1 and a positive domain");
  const double cross = 1.0 / std::sqrt(R);
  if (lattice_h > 0.0 && cross < 2.0 * lattice_h)
    throw Error(ErrorKind::ResolutionLoss, "caps of radius R^{-1/2} are below two lattice spacings");
  CapPartition p;
  p.base_dim = base_dim;
  p.R = R;
  p.spacing = 2.0 * cross;
  p.domain_radius = domain_radius;
  if (cross >= domain_radius) {
    p.single = true;
    p.spacing = 2.0 * domain_radius;
    p.centers.push_back(std::vector<double>(base_dim, 0.0));
    return p;
  }
  const double s = p.spacing;
  const int K = static_cast<int>(std::ceil(domain_radius / s)) + 1;
  std::array<int, 3> k{0, 0, 0};
  const int total = static_cast<int>(std::pow(2 * K + 1, base_dim));
  for (int flat = 0; flat < total; ++flat) {
    int rem = flat;
    for (int a = base_dim - 1; a >= 0; --a) {
      k[a] = rem % (2 * K + 1) - K;
      rem /= 2 * K + 1;
    }
    // distance from the origin to the open support box
    double d2 = 0.0;
    std::vector<double> c(base_dim);
    for (int a = 0; a < base_dim; ++a) {
      c[a] = k[a] * s;
      double gap = std::max(0.0, std::abs(c[a]) - s);
      d2 += gap * gap;
    }
    if (d2 < domain_radius * domain_radius) p.centers.push_back(std::move(c));
  }
  return p;
}

std::vector<double> PacketCoefficients::omega(const PacketEntry& e) const {
  const int m = partition.base_dim;
  const auto& b = boxes[e.cap];
  std::vector<double> w(m + 1);
  for (int a = 0; a < m; ++a) w[a] = e.freq[a] / (b.count[a] * shape.lattice.h);
  w[m] = e.freq[m] / (b.slices * shape.lattice.dt);
  return w;
}

double PacketCoefficients::box_volume(std::uint32_t cap) const {
  const auto& b = boxes[cap];
  double v = b.slices * shape.lattice.dt;
  for (int a = 0; a < partition.base_dim; ++a) v *= b.count[a] * shape.lattice.h;
  return v;
}

namespace {

struct BoxGeometry {
  std::vector<int> dims;
  std::size_t size = 1;
};

BoxGeometry geometry(const PacketBox& b, int m) {
  BoxGeometry g;
  for (int a = 0; a < m; ++a) g.dims.push_back(b.count[a]);
  g.dims.push_back(b.slices);
  for (int d : g.dims) g.size *= d;
  return g;
}

// Phase e(-<q/P, lo h - c> - q_n slice_lo / J) relating the plain DFT to the
// centered coefficients.
cplx shift_phase(const PacketCoefficients& c, const PacketBox& b, const std::vector<double>& center,
                 const std::array<int, 4>& q, int m) {
  double turns = 0.0;
  for (int a = 0; a < m; ++a) turns += q[a] * (b.lo[a] * c.shape.lattice.h - center[a]) / (b.count[a] * c.shape.lattice.h);
  turns += static_cast<double>(q[m]) * b.slice_lo / b.slices;
  return expi(-turns);
}

std::size_t flat_index(const std::vector<int>& dims, const int* k) {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < dims.size(); ++a) idx = idx * dims[a] + k[a];
  return idx;
}

// zeta-weighted density of the given box values (values indexed as the box).
NeighborhoodField box_density(const PacketCoefficients& c, std::uint32_t cap, const std::vector<cplx>& values) {
  const int m = c.partition.base_dim;
  const auto& b = c.boxes[cap];
  auto g = geometry(b, m);
  NeighborhoodField out = c.shape;
  out.entries.clear();
  std::vector<int> k(m + 1, 0);
  double xi[3];
  const double dom = c.shape.surface.domain_radius / c.shape.surface.scale;
  for (std::size_t flat = 0; flat < g.size; ++flat) {
    std::size_t rem = flat;
    for (int a = m; a >= 0; --a) {
      k[a] = rem % g.dims[a];
      rem /= g.dims[a];
    }
    if (values[flat] == cplx(0.0, 0.0)) continue;
    double r2 = 0.0;
    for (int a = 0; a < m; ++a) {
      xi[a] = (b.lo[a] + k[a]) * c.shape.lattice.h;
      r2 += xi[a] * xi[a];
    }
    if (r2 > dom * dom * (1.0 + 1e-12)) continue;
    double z = c.partition.zeta(cap, std::span<const double>(xi, m));
    if (z == 0.0) continue;
    SliceEntry e;
    for (int a = 0; a < m; ++a) e.idx[a] = b.lo[a] + k[a];
    e.slice = b.slice_lo + k[m];
    e.value = z * values[flat];
    out.entries.push_back(e);
  }
  return out;
}

}  // namespace

PacketCoefficients wp_decompose(const NeighborhoodField& f, double R, double drop_fraction) {
  const int m = f.base_dim();
  const double h = f.lattice.h;
  PacketCoefficients out;
  out.shape = f;
  out.shape.entries.clear();
  out.partition = cap_partition(m, f.surface.domain_radius / f.surface.scale, R, h);
  if (f.entries.empty()) return out;
  const auto& P = out.partition;

  int slice_lo = f.entries.front().slice, slice_hi = slice_lo;
  for (const auto& e : f.entries) {
    slice_lo = std::min(slice_lo, e.slice);
    slice_hi = std::max(slice_hi, e.slice);
  }
  const double half = P.single ? P.domain_radius : P.spacing;
  out.boxes.resize(P.centers.size());
  for (std::size_t c = 0; c < P.centers.size(); ++c) {
    auto& b = out.boxes[c];
    for (int a = 0; a < m; ++a) {
      int lo = static_cast<int>(std::ceil((P.centers[c][a] - half) / h - 1e-9));
      int hi = static_cast<int>(std::floor((P.centers[c][a] + half) / h + 1e-9));
      b.lo[a] = lo;
      b.count[a] = hi - lo + 1;
    }
    b.slice_lo = slice_lo;
    b.slices = slice_hi - slice_lo + 1;
  }

  // Scatter f zeta into the boxes of the caps it meets.
  std::map<std::size_t, std::vector<cplx>> buffers;
  double xi[3];
  for (const auto& e : f.entries) {
    for (int a = 0; a < m; ++a) xi[a] = e.idx[a] * h;
    std::span<const double> pt(xi, m);
    for (auto c : P.caps_at(pt)) {
      double z = P.zeta(c, pt);
      if (z == 0.0) continue;
      const auto& b = out.boxes[c];
      auto g = geometry(b, m);
      auto& buf = buffers[c];
      if (buf.empty()) buf.assign(g.size, cplx(0.0, 0.0));
      int k[4];
      bool inside = true;
      for (int a = 0; a < m; ++a) {
        k[a] = e.idx[a] - b.lo[a];
        inside = inside && k[a] >= 0 && k[a] < b.count[a];
      }
      k[m] = e.slice - b.slice_lo;
      if (!inside) continue;
      buf[flat_index(g.dims, k)] += z * e.value;
    }
  }

  const double measure = cell_measure(f);
  double amax = 0.0;
  for (auto& [cap, buf] : buffers) {
    const auto& b = out.boxes[cap];
    auto g = geometry(b, m);
    fft::execute(buf, g.dims, -1);
    const double scale = measure / std::sqrt(out.box_volume(static_cast<std::uint32_t>(cap)));
    std::array<int, 4> q{0, 0, 0, 0};
    int k[4];
    for (std::size_t flat = 0; flat < g.size; ++flat) {
      std::size_t rem = flat;
      for (int a = m; a >= 0; --a) {
        k[a] = static_cast<int>(rem % g.dims[a]);
        rem /= g.dims[a];
        q[a] = signed_index(k[a], g.dims[a]);
      }
      cplx a = buf[flat] * scale * shift_phase(out, b, P.centers[cap], q, m);
      amax = std::max(amax, std::abs(a));
      out.entries.push_back({static_cast<std::uint32_t>(cap), q, a});
    }
  }
  const double floor = drop_fraction * amax;
  std::erase_if(out.entries, [&](const PacketEntry& e) { return std::abs(e.a) <= floor; });
  return out;
}

PacketCoefficients truncate(const PacketCoefficients& c, double fraction) {
  PacketCoefficients out = c;
  double amax = 0.0;
  for (const auto& e : c.entries) amax = std::max(amax, std::abs(e.a));
  std::erase_if(out.entries, [&](const PacketEntry& e) { return std::abs(e.a) < fraction * amax; });
  return out;
}

namespace {

// sum_omega a e(<omega', xi' - c> + omega_n t) / |box|^{1/2} on the box points of one cap.
std::vector<cplx> synthesize(const PacketCoefficients& c, std::uint32_t cap,
                             std::span<const PacketEntry* const> entries) {
  const int m = c.partition.base_dim;
  const auto& b = c.boxes[cap];
  auto g = geometry(b, m);
  std::vector<cplx> buf(g.size, cplx(0.0, 0.0));
  for (const auto* e : entries) {
    int k[4];
    for (int a = 0; a <= m; ++a) k[a] = wrap(e->freq[a], g.dims[a]);
    buf[flat_index(g.dims, k)] += e->a * std::conj(shift_phase(c, b, c.partition.centers[cap], e->freq, m));
  }
  fft::execute(buf, g.dims, +1);
  const double scale = 1.0 / std::sqrt(c.box_volume(cap));
  for (auto& v : buf) v *= scale;
  return buf;
}

}  // namespace

std::vector<cplx> wp_reconstruct(const PacketCoefficients& c, std::span<const double> points) {
  const int n = c.partition.base_dim + 1;
  std::vector<cplx> out(points.size() / n, cplx(0.0, 0.0));
  std::map<std::uint32_t, std::vector<const PacketEntry*>> by_cap;
  for (const auto& e : c.entries) by_cap[e.cap].push_back(&e);
  NeighborhoodField total = c.shape;
  total.entries.clear();
  for (const auto& [cap, list] : by_cap) {
    auto values = synthesize(c, cap, list);
    auto part = box_density(c, cap, values);
    total.entries.insert(total.entries.end(), part.entries.begin(), part.entries.end());
  }
  normalize_entries(total.entries);
  if (total.entries.empty()) return out;
  return extension_eval(total, points);
}

std::vector<cplx> packet_field(const PacketCoefficients& c, const PacketEntry& e, std::span<const double> points) {
  PacketEntry unit = e;
  unit.a = cplx(1.0, 0.0);
  const PacketEntry* list[1] = {&unit};
  auto values = synthesize(c, e.cap, list);
  auto density = box_density(c, e.cap, values);
  if (density.entries.empty()) return std::vector<cplx>(points.size() / (c.partition.base_dim + 1));
  return extension_eval(density, points);
}

PacketTube packet_tube(const PacketCoefficients& c, const PacketEntry& e) {
  const int m = c.partition.base_dim;
  std::vector<double> center = c.partition.centers[e.cap];
  // Caps near the rim may have their center just outside the domain.
  double r = 0.0;
  for (double v : center) r += v * v;
  r = std::sqrt(r);
  const double dom = c.shape.surface.domain_radius / c.shape.surface.scale * (1.0 - 1e-9);
  if (r > dom)
    for (auto& v : center) v *= dom / r;
  Eigen::VectorXd grad = surface_gradient(c.shape.surface, center);
  auto w = c.omega(e);
  PacketTube t;
  t.direction.resize(m + 1);
  t.base.resize(m + 1);
  double norm = std::sqrt(1.0 + grad.squaredNorm());
  for (int a = 0; a < m; ++a) {
    t.direction[a] = -grad[a] / norm;
    t.base[a] = -w[a] + w[m] * grad[a];
  }
  t.direction[m] = 1.0 / norm;
  t.base[m] = -w[m];
  t.cross_radius = std::sqrt(c.partition.R);
  return t;
}

DecayAudit packet_decay_audit(const PacketCoefficients& c, const PacketEntry& e, double xn,
                              const std::vector<double>& multiples) {
  const int n = c.partition.base_dim + 1;
  auto tube = packet_tube(c, e);
  std::vector<double> axis(n);
  double s = (xn - tube.base[n - 1]) / tube.direction[n - 1];
  for (int a = 0; a < n; ++a) axis[a] = tube.base[a] + s * tube.direction[a];
  // unit vector orthogonal to the tube, in the span of e_1 and the direction
  std::vector<double> u(n, 0.0);
  u[0] = 1.0;
  double dot = tube.direction[0];
  double un = 0.0;
  for (int a = 0; a < n; ++a) {
    u[a] -= dot * tube.direction[a];
    un += u[a] * u[a];
  }
  for (auto& v : u) v /= std::sqrt(un);

  std::vector<double> pts(axis);
  for (double mult : multiples)
    for (int a = 0; a < n; ++a) pts.push_back(axis[a] + mult * tube.cross_radius * u[a]);
  auto vals = packet_field(c, e, pts);
  DecayAudit out;
  out.axis_amplitude = std::abs(vals[0]);
  out.distances = multiples;
  for (std::size_t j = 0; j < multiples.size(); ++j) out.amplitudes.push_back(std::abs(vals[j + 1]));
  if (multiples.size() >= 2) {
    auto fit = fit_power_law(out.distances, out.amplitudes);
    out.exponent = -fit.exponent;
  }
  return out;
}

}  // namespace rlab

#include "rlab/grid.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "rlab/error.hpp"
#include "rlab/fft.hpp"
#include "rlab/kernels.hpp"

namespace rlab {

namespace {

void check_same_grid(const Field& a, const Field& b) {
  require(a.grid == b.grid, ErrorKind::InvalidArgument, "fields live on different grids");
  require(a.values.size() == b.values.size(), ErrorKind::InvalidArgument, "field size mismatch");
}

// (-1)^{sum k} phase that centres the transform at the origin of [-L, L)^d.
void apply_centre_phase(Field& f) {
  const int d = f.grid.dim, n = f.grid.n;
  std::size_t total = f.values.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    int parity = 0;
    for (int a = 0; a < d; ++a) {
      parity += static_cast<int>(rest % n);
      rest /= n;
    }
    if (parity & 1) f.values[flat] = -f.values[flat];
  }
}

}  // namespace

std::size_t FourierGrid::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

double FourierGrid::freq_spacing() const { return M_PI / box_radius; }

double FourierGrid::cell_volume() const { return std::pow(spacing(), dim); }

void FourierGrid::point(std::size_t flat, std::span<double> x) const {
  for (int a = dim - 1; a >= 0; --a) {
    x[a] = coord(static_cast<int>(flat % n));
    flat /= n;
  }
}

void FourierGrid::frequency(std::size_t flat, std::span<double> xi) const {
  for (int a = dim - 1; a >= 0; --a) {
    xi[a] = freq(static_cast<int>(flat % n));
    flat /= n;
  }
}

FourierGrid make_grid(int d, int n, double box_radius, int memory_cap_log2) {
  require(d >= 1, ErrorKind::InvalidArgument, "dimension must be >= 1");
  require(n >= 8 && std::has_single_bit(static_cast<unsigned>(n)), ErrorKind::NonPowerOfTwo,
          "points per axis must be a power of two >= 8, got " + std::to_string(n));
  require(box_radius > 0.0, ErrorKind::InvalidArgument, "box radius must be positive");
  int log2n = std::countr_zero(static_cast<unsigned>(n));
  require(d * log2n <= memory_cap_log2, ErrorKind::MemoryCap,
          "grid of 2^" + std::to_string(d * log2n) + " points exceeds cap 2^" + std::to_string(memory_cap_log2));
  return FourierGrid{d, n, box_radius};
}

Field zeros(const FourierGrid& grid, Representation rep) {
  return Field{grid, rep, std::vector<cplx>(grid.size(), cplx(0.0, 0.0))};
}

Field sample(const FourierGrid& grid, const PointFunction& fn) {
  Field f = zeros(grid, Representation::physical);
  std::vector<double> x(grid.dim);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    grid.point(k, x);
    f.values[k] = fn(x);
  }
  return f;
}

Field sample_frequency(const FourierGrid& grid, const Multiplier& fn) {
  Field f = zeros(grid, Representation::frequency);
  std::vector<double> xi(grid.dim);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    grid.frequency(k, xi);
    f.values[k] = fn(xi);
  }
  return f;
}

Field transform(const Field& field, Direction direction) {
  bool forward = direction == Direction::forward;
  require(field.rep == (forward ? Representation::physical : Representation::frequency),
          ErrorKind::RepresentationMismatch, "transform direction does not match representation");
  Field out = field;
  std::vector<int> dims(field.grid.dim, field.grid.n);
  if (!forward) apply_centre_phase(out);
  fft::execute(out.values, dims, forward ? -1 : +1);
  double norm = 1.0 / std::sqrt(static_cast<double>(out.values.size()));
  for (auto& v : out.values) v *= norm;
  if (forward) apply_centre_phase(out);
  out.rep = forward ? Representation::frequency : Representation::physical;
  return out;
}

Field to_physical(const Field& field) {
  return field.rep == Representation::physical ? field : transform(field, Direction::inverse);
}

Field to_frequency(const Field& field) {
  return field.rep == Representation::frequency ? field : transform(field, Direction::forward);
}

double lp_norm(const Field& field, double p, const std::optional<Ball>& region) {
  require(p >= 1.0, ErrorKind::InvalidArgument, "lp_norm requires p >= 1");
  const Field phys = to_physical(field);
  const FourierGrid& g = phys.grid;
  std::vector<std::uint8_t> mask;
  if (region) {
    require(static_cast<int>(region->center.size()) == g.dim, ErrorKind::InvalidArgument,
            "region centre has wrong dimension");
    mask.assign(phys.values.size(), 0);
    std::vector<double> x(g.dim);
    double r2 = region->radius * region->radius;
    for (std::size_t k = 0; k < mask.size(); ++k) {
      g.point(k, x);
      double s = 0.0;
      for (int a = 0; a < g.dim; ++a) s += (x[a] - region->center[a]) * (x[a] - region->center[a]);
      mask[k] = s <= r2 ? 1 : 0;
    }
  }
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t k = 0; k < phys.values.size(); ++k)
      if (mask.empty() || mask[k]) m = std::max(m, std::abs(phys.values[k]));
    return m;
  }
  double s = kernels::power_sum(phys.values, p, mask);
  return std::pow(s * g.cell_volume(), 1.0 / p);
}

double l2_mass(const Field& field) {
  return kernels::weighted_mass(field.values, {}) * field.grid.cell_volume();
}

Field apply_multiplier(const Field& field, const Multiplier& m) {
  Field f = to_frequency(field);
  std::vector<double> xi(f.grid.dim);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    f.grid.frequency(k, xi);
    cplx mk = m(xi);
    require(std::isfinite(mk.real()) && std::isfinite(mk.imag()), ErrorKind::NonFinite,
            "multiplier is not finite on the lattice");
    f.values[k] *= mk;
  }
  return field.rep == Representation::physical ? to_physical(f) : f;
}

Field partial_derivative(const Field& field, int axis) {
  require(axis >= 0 && axis < field.grid.dim, ErrorKind::InvalidArgument, "axis out of range");
  return apply_multiplier(field, [axis](std::span<const double> xi) { return cplx(0.0, xi[axis]); });
}

Field laplacian(const Field& field) {
  return apply_multiplier(field, [](std::span<const double> xi) {
    double s = 0.0;
    for (double v : xi) s += v * v;
    return cplx(-s, 0.0);
  });
}

Field add(const Field& a, const Field& b) {
  check_same_grid(a, b);
  require(a.rep == b.rep, ErrorKind::RepresentationMismatch, "add: representations differ");
  Field out = a;
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += b.values[k];
  return out;
}

Field subtract(const Field& a, const Field& b) {
  check_same_grid(a, b);
  require(a.rep == b.rep, ErrorKind::RepresentationMismatch, "subtract: representations differ");
  Field out = a;
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] -= b.values[k];
  return out;
}

Field scale(const Field& a, cplx s) {
  Field out = a;
  for (auto& v : out.values) v *= s;
  return out;
}

Field multiply(const Field& a, const Field& b) {
  check_same_grid(a, b);
  Field pa = to_physical(a);
  Field pb = to_physical(b);
  for (std::size_t k = 0; k < pa.values.size(); ++k) pa.values[k] *= pb.values[k];
  return pa;
}

Field conjugate(const Field& a) {
  Field out = to_physical(a);
  for (auto& v : out.values) v = std::conj(v);
  return out;
}

cplx inner_product(const Field& a, const Field& b) {
  check_same_grid(a, b);
  Field pa = to_physical(a);
  Field pb = to_physical(b);
  cplx s = 0.0;
  for (std::size_t k = 0; k < pa.values.size(); ++k) s += pa.values[k] * std::conj(pb.values[k]);
  return s * pa.grid.cell_volume();
}

double max_abs(const Field& a) {
  double m = 0.0;
  for (const auto& v : a.values) m = std::max(m, std::abs(v));
  return m;
}

bool spectral_support_warning(const Field& field, double threshold) {
  Field f = to_frequency(field);
  const int d = f.grid.dim, n = f.grid.n;
  double total = 0.0, outer = 0.0;
  for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
    double w = std::norm(f.values[flat]);
    total += w;
    std::size_t rest = flat;
    bool in_outer = false;
    for (int a = 0; a < d; ++a) {
      int k = f.grid.freq_index(static_cast<int>(rest % n));
      rest /= n;
      if (std::abs(k) >= n / 4) in_outer = true;
    }
    if (in_outer) outer += w;
  }
  return total > 0.0 && outer > threshold * total;
}

double bump_shape(BumpKind kind, double s) {
  double a = std::abs(s);
  if (a >= 1.0) return 0.0;
  if (kind == BumpKind::smooth_exponential) return std::exp(1.0 - 1.0 / (1.0 - a * a));
  double c = std::cos(0.5 * M_PI * a);
  return c * c;
}

std::function<double(double)> smooth_bump(const BumpProfile& profile, double center, double radius) {
  require(radius > 0.0 && profile.support_radius > 0.0, ErrorKind::InvalidArgument, "bump radius must be positive");
  double width = radius * profile.support_radius;
  BumpKind kind = profile.kind;
  return [kind, center, width](double t) { return bump_shape(kind, (t - center) / width); };
}

double smooth_step(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  double a = std::exp(-1.0 / (2.0 - s));
  double b = std::exp(-1.0 / (s - 1.0));
  return a / (a + b);
}

namespace {

constexpr char kMagic[5] = {'R', 'L', 'A', 'B', '1'};

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

template <class T>
T get_le(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw Error(ErrorKind::Io, "truncated RLAB1 stream");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void write_block(const std::string& path, long long d, long long n, double box_radius,
                 std::span<const cplx> values) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(os), ErrorKind::Unwritable, "cannot open " + path);
  os.write(kMagic, 5);
  put_le<std::int64_t>(os, d);
  put_le<std::int64_t>(os, n);
  put_le<double>(os, box_radius);
  for (const auto& v : values) {
    put_le<double>(os, v.real());
    put_le<double>(os, v.imag());
  }
  require(static_cast<bool>(os), ErrorKind::Unwritable, "write failed for " + path);
}

RawBlock read_block(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::Io, "cannot open " + path);
  char magic[5];
  is.read(magic, 5);
  require(is && std::memcmp(magic, kMagic, 5) == 0, ErrorKind::Io, "bad RLAB1 magic in " + path);
  RawBlock b;
  b.d = get_le<std::int64_t>(is);
  b.n = get_le<std::int64_t>(is);
  b.box_radius = get_le<double>(is);
  std::vector<cplx> values;
  while (true) {
    unsigned char probe;
    if (!is.read(reinterpret_cast<char*>(&probe), 1)) break;
    is.unget();
    double re = get_le<double>(is);
    double im = get_le<double>(is);
    values.emplace_back(re, im);
  }
  b.values = std::move(values);
  return b;
}

void write_field(const std::string& path, const Field& field) {
  Field phys = to_physical(field);
  write_block(path, phys.grid.dim, phys.grid.n, phys.grid.box_radius, phys.values);
}

Field read_field(const std::string& path) {
  RawBlock b = read_block(path);
  FourierGrid g = make_grid(static_cast<int>(b.d), static_cast<int>(b.n), b.box_radius);
  require(b.values.size() == g.size(), ErrorKind::Io, "RLAB1 payload size does not match header");
  return Field{g, Representation::physical, std::move(b.values)};
}

}  // namespace rlab

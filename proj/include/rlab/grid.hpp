#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rlab {

using cplx = std::complex<double>;

// Periodic lattice on [-L, L)^d with N points per axis. Frequencies are
// angular: the lattice is {pi k / L : k in [-N/2, N/2)^d} and d/dx_j is the
// multiplier i xi_j.
struct FourierGrid {
  int dim = 1;
  int n = 8;
  double box_radius = 1.0;

  std::size_t size() const;
  double spacing() const { return 2.0 * box_radius / n; }
  double freq_spacing() const;
  double cell_volume() const;
  // Physical coordinate of storage slot j along one axis.
  double coord(int j) const { return -box_radius + spacing() * j; }
  // Signed lattice index of frequency storage slot j (FFT order).
  int freq_index(int j) const { return j < n / 2 ? j : j - n; }
  double freq(int j) const { return freq_index(j) * freq_spacing(); }
  void point(std::size_t flat, std::span<double> x) const;
  void frequency(std::size_t flat, std::span<double> xi) const;

  bool operator==(const FourierGrid& o) const {
    return dim == o.dim && n == o.n && box_radius == o.box_radius;
  }
};

inline constexpr int kDefaultMemoryCapLog2 = 27;

// Errors: NonPowerOfTwo, MemoryCap (d*log2(N) above the cap), InvalidArgument.
FourierGrid make_grid(int d, int n, double box_radius, int memory_cap_log2 = kDefaultMemoryCapLog2);

enum class Representation { physical, frequency };
enum class Direction { forward, inverse };

struct Field {
  FourierGrid grid;
  Representation rep = Representation::physical;
  std::vector<cplx> values;
};

using PointFunction = std::function<cplx(std::span<const double>)>;
using Multiplier = std::function<cplx(std::span<const double>)>;

Field zeros(const FourierGrid& grid, Representation rep = Representation::physical);
Field sample(const FourierGrid& grid, const PointFunction& fn);
Field sample_frequency(const FourierGrid& grid, const Multiplier& fn);

// Unitary transform. Frequency coefficient k carries the phase of the
// continuous transform centred at the origin: u_hat_k = N^{-d/2} sum_j u_j e^{-i xi_k x_j}.
Field transform(const Field& field, Direction direction);
Field to_physical(const Field& field);
Field to_frequency(const Field& field);

struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

// Riemann-sum L^p norm on physical samples; p = infinity allowed.
double lp_norm(const Field& field, double p, const std::optional<Ball>& region = std::nullopt);
// Sum |values|^2 times the physical cell volume; equal to ||u||_2^2 in either representation.
double l2_mass(const Field& field);

// Multiplies frequency coefficients by m(xi); the output keeps the input representation.
Field apply_multiplier(const Field& field, const Multiplier& m);
Field partial_derivative(const Field& field, int axis);
Field laplacian(const Field& field);

Field add(const Field& a, const Field& b);
Field subtract(const Field& a, const Field& b);
Field scale(const Field& a, cplx s);
Field multiply(const Field& a, const Field& b);  // physical pointwise product
Field conjugate(const Field& a);
cplx inner_product(const Field& a, const Field& b);  // integral of a * conj(b)
double max_abs(const Field& a);

// True when frequency mass above 1e-10 of the total sits in the outer quarter
// of the lattice (|k_j| >= N/4 on some axis), where aliasing is no longer negligible.
bool spectral_support_warning(const Field& field, double threshold = 1e-10);

enum class BumpKind { smooth_exponential, cosine_taper };

struct BumpProfile {
  BumpKind kind = BumpKind::smooth_exponential;
  double support_radius = 1.0;
};

// b(t) = shape((t - center) / (radius * support_radius)), shape(0) = 1,
// shape vanishing for |s| >= 1. smooth_exponential is exp(1 - 1/(1 - s^2)).
std::function<double(double)> smooth_bump(const BumpProfile& profile, double center, double radius);
double bump_shape(BumpKind kind, double s);

// C-infinity step: 1 on (-inf, 1], 0 on [2, inf).
double smooth_step(double s);

// RLAB1 binary format: magic, d, N (int64 LE), L (float64 LE), then
// interleaved re/im float64 in row-major lattice order of the physical samples.
void write_field(const std::string& path, const Field& field);
Field read_field(const std::string& path);
void write_block(const std::string& path, long long d, long long n, double box_radius,
                 std::span<const cplx> values);
struct RawBlock {
  long long d = 0;
  long long n = 0;
  double box_radius = 0.0;
  std::vector<cplx> values;
};
RawBlock read_block(const std::string& path);

}  // namespace rlab

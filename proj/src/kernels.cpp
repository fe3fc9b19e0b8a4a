#include "rlab/kernels.hpp"

#include <cmath>

#include "rlab/error.hpp"

namespace rlab::kernels {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double abs_pow(double a, double p) {
  if (p == 2.0) return a * a;
  if (p == 1.0) return a;
  return std::pow(a, p);
}

template <class Body>
double blocked_sum(std::size_t n, Body body) {
  std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    std::size_t lo = b * kBlock;
    std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += body(k);
    partial[b] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace

double weighted_mass(std::span<const cplx> v, std::span<const double> w, Exec exec) {
  if (!w.empty() && w.size() != v.size()) throw Error(ErrorKind::InvalidArgument, "weight size mismatch");
  if (exec == Exec::serial) {
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) s += (w.empty() ? 1.0 : w[k]) * std::norm(v[k]);
    return s;
  }
  return blocked_sum(v.size(), [&](std::size_t k) { return (w.empty() ? 1.0 : w[k]) * std::norm(v[k]); });
}

double power_sum(std::span<const cplx> v, double p, std::span<const std::uint8_t> mask, Exec exec) {
  if (!mask.empty() && mask.size() != v.size()) throw Error(ErrorKind::InvalidArgument, "mask size mismatch");
  auto term = [&](std::size_t k) {
    if (!mask.empty() && mask[k] == 0) return 0.0;
    return abs_pow(std::abs(v[k]), p);
  };
  if (exec == Exec::serial) {
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) s += term(k);
    return s;
  }
  return blocked_sum(v.size(), term);
}

double product_power_sum(std::span<const cplx> a, std::span<const cplx> b, double p,
                         std::span<const std::uint8_t> mask, Exec exec) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "product size mismatch");
  if (!mask.empty() && mask.size() != a.size()) throw Error(ErrorKind::InvalidArgument, "mask size mismatch");
  auto term = [&](std::size_t k) {
    if (!mask.empty() && mask[k] == 0) return 0.0;
    return abs_pow(std::abs(a[k]) * std::abs(b[k]), p);
  };
  if (exec == Exec::serial) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += term(k);
    return s;
  }
  return blocked_sum(a.size(), term);
}

void multiply_inplace(std::span<cplx> v, std::span<const cplx> m, Exec exec) {
  if (v.size() != m.size()) throw Error(ErrorKind::InvalidArgument, "multiplier size mismatch");
  if (exec == Exec::serial) {
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= m[k];
    return;
  }
  std::size_t n = v.size();
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < n; ++k) v[k] *= m[k];
}

std::vector<cplx> oscillatory_sum(std::span<const double> xi, std::span<const double> phi,
                                  std::span<const cplx> w, int m, std::span<const double> x, Exec exec) {
  std::size_t K = w.size();
  if (xi.size() != K * static_cast<std::size_t>(m) || phi.size() != K)
    throw Error(ErrorKind::InvalidArgument, "oscillatory_sum: inconsistent lattice arrays");
  std::size_t stride = static_cast<std::size_t>(m) + 1;
  if (x.size() % stride != 0) throw Error(ErrorKind::InvalidArgument, "oscillatory_sum: bad point array");
  std::size_t J = x.size() / stride;
  std::vector<cplx> out(J);
  auto one = [&](std::size_t j) {
    const double* xj = x.data() + j * stride;
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      double phase = xj[m] * phi[k];
      const double* xk = xi.data() + k * m;
      for (int i = 0; i < m; ++i) phase += xj[i] * xk[i];
      double c = std::cos(kTwoPi * phase), s = std::sin(kTwoPi * phase);
      re += w[k].real() * c - w[k].imag() * s;
      im += w[k].real() * s + w[k].imag() * c;
    }
    out[j] = cplx(re, im);
  };
  if (exec == Exec::serial) {
    for (std::size_t j = 0; j < J; ++j) one(j);
  } else {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t j = 0; j < J; ++j) one(j);
  }
  return out;
}

}  // namespace rlab::kernels

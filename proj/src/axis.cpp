#include "rlab/axis.hpp"

#include <cmath>
#include <vector>

#include "rlab/error.hpp"
#include "rlab/fft.hpp"

namespace rlab {

namespace {

std::vector<double> profile(double mu, double spacing, int len) {
  std::vector<double> phi(len);
  for (int j = 0; j < len; ++j) {
    int w = j <= len / 2 ? j : j - len;  // wrapped offset
    double y = w * spacing;
    phi[j] = mu * std::exp(-M_PI * mu * mu * y * y);
  }
  return phi;
}

double lp(std::span<const std::complex<double>> v, double p, double spacing) {
  double s = 0.0;
  for (auto x : v) s += std::pow(std::abs(x), p);
  return std::pow(s * spacing, 1.0 / p);
}

}  // namespace

double axis_constant(double mu, double p_prime, double spacing, int length) {
  auto phi = profile(mu, spacing, length);
  double s = 0.0;
  for (double v : phi) s += std::pow(v, p_prime);
  double norm = std::pow(s * spacing, 1.0 / p_prime);
  return norm / std::pow(mu, 1.0 - 1.0 / p_prime);
}

AxisBound axis_bound(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b,
                     double spacing, double mu, double p_prime) {
  require(p_prime >= 1.0 && p_prime <= 2.0, ErrorKind::InvalidArgument, "p' must lie in [1, 2]");
  require(a.size() == b.size() && !a.empty(), ErrorKind::InvalidArgument, "a and b must share a grid");
  require(mu > 0.0 && spacing > 0.0, ErrorKind::InvalidArgument, "mu and spacing must be positive");
  const int len = static_cast<int>(a.size());
  require(len * spacing >= 4.0 / mu * (1.0 - 1e-12), ErrorKind::InvalidArgument, "period must be at least 4/mu");

  auto phi = profile(mu, spacing, len);
  std::vector<std::complex<double>> A(a.begin(), a.end()), P(len);
  for (int j = 0; j < len; ++j) P[j] = phi[j];
  fft::execute(A, {len}, -1);
  fft::execute(P, {len}, -1);
  for (int j = 0; j < len; ++j) A[j] *= P[j];
  fft::execute(A, {len}, +1);
  for (int j = 0; j < len; ++j) A[j] *= spacing / len * b[j];

  AxisBound out;
  out.lhs = lp(A, p_prime, spacing);
  out.constant = axis_constant(mu, p_prime, spacing, len);
  out.rhs = out.constant * std::pow(mu, 1.0 - 1.0 / p_prime) * lp(a, 2.0, spacing) * lp(b, 2.0, spacing);
  return out;
}

}  // namespace rlab

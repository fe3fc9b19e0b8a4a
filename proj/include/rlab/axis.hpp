#pragma once

#include <complex>
#include <span>

namespace rlab {

struct AxisBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
};

// phi_mu(y) = mu exp(-pi mu^2 y^2), sampled periodically on the same grid as a, b.
// lhs = ||(a * phi_mu) b||_{p'}, rhs = C mu^{1/p} ||a||_2 ||b||_2 where C is the
// discrete ||phi_mu||_{p'} / mu^{1/p} of the sampled profile (its Young constant).
// a and b are samples at x_j = (j - len/2) * spacing. Errors: InvalidArgument if
// p' is outside [1, 2], the sizes differ, or the period is shorter than 4/mu.
AxisBound axis_bound(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b,
                     double spacing, double mu, double p_prime);

// The constant C above for a given sampling.
double axis_constant(double mu, double p_prime, double spacing, int length);

}  // namespace rlab

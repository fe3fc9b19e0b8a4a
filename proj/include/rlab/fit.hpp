#pragma once

#include <vector>

#include <Eigen/Dense>

namespace rlab {

struct LinearFit {
  Eigen::VectorXd coef;  // intercept first
  double r2 = 0.0;
  double rms = 0.0;  // root-mean-square residual
};

// Least squares y ~ c0 + sum_j c_j X(:, j). Errors: InvalidArgument when the
// system is underdetermined.
LinearFit fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct PowerLaw {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
};

// y ~ prefactor * x^exponent, fitted in log-log. Non-positive entries are rejected.
PowerLaw fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rlab

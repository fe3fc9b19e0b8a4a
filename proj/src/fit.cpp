#include "rlab/fit.hpp"

#include <cmath>

#include "rlab/error.hpp"

namespace rlab {

LinearFit fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows(), k = X.cols() + 1;
  require(y.size() == n, ErrorKind::InvalidArgument, "fit: row count mismatch");
  require(n >= k, ErrorKind::InvalidArgument, "fit: fewer observations than parameters");
  Eigen::MatrixXd A(n, k);
  A.col(0).setOnes();
  A.rightCols(k - 1) = X;
  LinearFit fit;
  fit.coef = A.colPivHouseholderQr().solve(y);
  Eigen::VectorXd res = y - A * fit.coef;
  double ss_res = res.squaredNorm();
  double ss_tot = (y.array() - y.mean()).square().sum();
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.rms = std::sqrt(ss_res / n);
  return fit;
}

PowerLaw fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidArgument, "power-law fit needs >= 2 points");
  Eigen::MatrixXd X(x.size(), 1);
  Eigen::VectorXd ly(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, ErrorKind::DomainViolation, "power-law fit needs positive data");
    X(i, 0) = std::log(x[i]);
    ly(i) = std::log(y[i]);
  }
  LinearFit f = fit_linear(X, ly);
  return PowerLaw{f.coef(1), std::exp(f.coef(0)), f.r2};
}

}  // namespace rlab

#include "rlab/rotation.hpp"

#include "rlab/error.hpp"
#include "rlab/random.hpp"

namespace rlab {

Eigen::MatrixXd haar_rotation(std::uint64_t seed, int d) {
  require(d >= 1, ErrorKind::InvalidArgument, "haar_rotation: dimension must be >= 1");
  Rng rng = make_rng(seed, 0x4841415255ULL);
  Eigen::MatrixXd g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = gaussian(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace rlab

#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace rlab {

// Haar-distributed element of O(d): QR of a Gaussian matrix, columns sign-fixed
// so that R has a positive diagonal.
Eigen::MatrixXd haar_rotation(std::uint64_t seed, int d);

}  // namespace rlab

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace rlab::fft {

// In-place unnormalized multidimensional DFT on a row-major array.
// sign = -1 computes sum_j v_j exp(-2 pi i j.k / n), sign = +1 the conjugate sum.
// Plans are cached per (dims, sign); execution is re-entrant.
void execute(std::span<std::complex<double>> data, const std::vector<int>& dims, int sign);

}  // namespace rlab::fft

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

// Hot loops in two flavours: a plain serial reference and an OpenMP version.
// The parallel reductions accumulate fixed-size blocks and add the block
// partials in order, so their result does not depend on the thread count.
namespace rlab::kernels {

using cplx = std::complex<double>;

enum class Exec { serial, parallel };

inline constexpr std::size_t kBlock = 4096;

// sum_k w_k |v_k|^2 (w empty means all ones)
double weighted_mass(std::span<const cplx> v, std::span<const double> w, Exec exec = Exec::parallel);

// sum_k |v_k|^p over entries with mask_k != 0 (mask empty means all)
double power_sum(std::span<const cplx> v, double p, std::span<const std::uint8_t> mask,
                 Exec exec = Exec::parallel);

// sum_k |a_k b_k|^p over entries with mask_k != 0
double product_power_sum(std::span<const cplx> a, std::span<const cplx> b, double p,
                         std::span<const std::uint8_t> mask, Exec exec = Exec::parallel);

// v_k *= m_k
void multiply_inplace(std::span<cplx> v, std::span<const cplx> m, Exec exec = Exec::parallel);

// Direct oscillatory sum  out_j = sum_k w_k e(<x'_j, xi_k> + x_{n,j} phi_k), e(z) = exp(2 pi i z).
// xi: K points of dimension m (row-major, K*m), phi: K values, w: K weights,
// x: J points of dimension m+1 (row-major).
std::vector<cplx> oscillatory_sum(std::span<const double> xi, std::span<const double> phi,
                                  std::span<const cplx> w, int m, std::span<const double> x,
                                  Exec exec = Exec::parallel);

}  // namespace rlab::kernels

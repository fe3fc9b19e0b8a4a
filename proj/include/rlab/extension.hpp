#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "rlab/lattice.hpp"

namespace rlab {

// Direct oscillatory sum Ef(x) = sum F e(<x', xi'> + x_n (Phi(xi') + t)) h^{n-1} dt,
// e(z) = exp(2 pi i z). Points are row-major with n coordinates each.
std::vector<cplx> extension_eval(const NeighborhoodField& f, std::span<const double> points);

struct EvalOptions {
  double dx = 0.5;   // target x' spacing
  double dxn = 0.5;  // target x_n spacing
};

// Sample layout shared by several fields on one slice lattice. x' runs over the
// period cell [-1/(2h), 1/(2h))^{n-1} with m points per axis; x_n over
// [-R, R] when a ball B_R is given, otherwise over [-1/(2 dt), 1/(2 dt)).
struct EvalLayout {
  int base_dim = 1;
  SliceLattice lattice;
  int m = 0;
  std::array<int, 3> k0{0, 0, 0};
  double dx = 0.0;   // 1 / (m h)
  double dxn = 0.0;
  std::vector<double> xn;
  std::optional<double> radius;

  std::size_t plane_size() const;
  double x_coord(int l) const { return (l - m / 2) * dx; }
  // Quadrature weight of one sample point.
  double point_weight() const;
};

// Errors: InvalidArgument if the fields use different lattices or the x' period
// cell does not contain the ball.
EvalLayout make_layout(std::span<const NeighborhoodField* const> fields, std::optional<double> radius,
                       const EvalOptions& options = {});

// Evaluates Ef on one x_n plane of a layout by a single FFT.
class PlaneEvaluator {
 public:
  PlaneEvaluator(const NeighborhoodField& f, const EvalLayout& layout);
  // out has layout.plane_size() values, row-major with the last axis fastest.
  void evaluate(double xn, std::vector<cplx>& out) const;

 private:
  struct Column {
    std::size_t position;
    double phi;
    std::size_t begin, end;
    double sign;
  };
  const EvalLayout* layout_;
  double measure_;
  int slice_lo_ = 0, slice_hi_ = 0;
  double dt_ = 0.0;
  std::vector<Column> columns_;
  std::vector<int> slices_;
  std::vector<cplx> values_;
  std::vector<std::vector<cplx>> axis_phase_;
};

// Mask of plane points inside B_R at height xn (all ones without a region).
std::vector<std::uint8_t> plane_mask(const EvalLayout& layout, double xn);

// Integral of |Ef|^p over the layout.
double power_integral(const NeighborhoodField& f, double p, const EvalLayout& layout);
// Integral of |Ef Eg|^p over the layout.
double product_power_integral(const NeighborhoodField& f, const NeighborhoodField& g, double p,
                              const EvalLayout& layout);

// ||Ef||_{L^2(B_R)} / (R^{1/2} ||f||) for a surface density f.
double trace_constant(const NeighborhoodField& f, double R, const EvalOptions& options = {});

}  // namespace rlab

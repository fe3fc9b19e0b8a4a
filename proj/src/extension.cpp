#include "rlab/extension.hpp"

#include <cmath>

#include "rlab/error.hpp"
#include "rlab/fft.hpp"
#include "rlab/kernels.hpp"

namespace rlab {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

cplx expi(double turns) { return std::polar(1.0, kTwoPi * turns); }

int next_pow2(long v) {
  int m = 1;
  while (m < v) m *= 2;
  return m;
}

}  // namespace

std::vector<cplx> extension_eval(const NeighborhoodField& f, std::span<const double> points) {
  const int m = f.base_dim();
  std::vector<double> xi, phi;
  std::vector<cplx> w;
  xi.reserve(f.entries.size() * m);
  const double measure = cell_measure(f);
  for (const auto& e : f.entries) {
    for (int a = 0; a < m; ++a) xi.push_back(e.idx[a] * f.lattice.h);
    phi.push_back(entry_phi(f, e));
    w.push_back(e.value * measure);
  }
  return kernels::oscillatory_sum(xi, phi, w, m, points);
}

std::size_t EvalLayout::plane_size() const {
  std::size_t s = 1;
  for (int a = 0; a < base_dim; ++a) s *= static_cast<std::size_t>(m);
  return s;
}

double EvalLayout::point_weight() const { return std::pow(dx, base_dim) * dxn; }

EvalLayout make_layout(std::span<const NeighborhoodField* const> fields, std::optional<double> radius,
                       const EvalOptions& options) {
  require(!fields.empty(), ErrorKind::InvalidArgument, "layout needs at least one field");
  require(options.dx > 0.0 && options.dxn > 0.0, ErrorKind::InvalidArgument, "sample spacings must be positive");
  EvalLayout L;
  L.base_dim = fields.front()->base_dim();
  L.lattice = fields.front()->lattice;
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  bool any = false, stacked = false;
  for (const auto* f : fields) {
    require(f->base_dim() == L.base_dim, ErrorKind::InvalidArgument, "fields live in different dimensions");
    require(f->lattice.h == L.lattice.h && f->lattice.dt == L.lattice.dt, ErrorKind::InvalidArgument,
            "fields use different slice lattices");
    for (const auto& e : f->entries) {
      for (int a = 0; a < L.base_dim; ++a) {
        lo[a] = any ? std::min(lo[a], e.idx[a]) : e.idx[a];
        hi[a] = any ? std::max(hi[a], e.idx[a]) : e.idx[a];
      }
      any = true;
      stacked = stacked || e.slice != f->entries.front().slice;
    }
  }
  long span = 1;
  for (int a = 0; a < L.base_dim; ++a) span = std::max<long>(span, hi[a] - lo[a] + 1);
  const double h = L.lattice.h;
  L.m = std::max(next_pow2(static_cast<long>(std::ceil(1.0 / (h * options.dx) - 1e-9))), next_pow2(span));
  L.k0 = lo;
  L.dx = 1.0 / (L.m * h);
  L.radius = radius;
  if (radius) {
    require(*radius > 0.0, ErrorKind::InvalidArgument, "ball radius must be positive");
    require(0.5 / h >= *radius * (1.0 - 1e-12), ErrorKind::InvalidArgument,
            "x' period cell does not contain the ball; refine the lattice");
    // several slices repeat in x_n with period 1/dt
    require(!stacked || 0.5 / L.lattice.dt >= *radius * (1.0 - 1e-12), ErrorKind::InvalidArgument,
            "x_n period does not contain the ball; refine the slice spacing");
    L.dxn = options.dxn;
    int steps = static_cast<int>(std::floor(*radius / options.dxn + 1e-9));
    for (int i = -steps; i <= steps; ++i) L.xn.push_back(i * options.dxn);
  } else {
    double period = 1.0 / L.lattice.dt;
    int planes = static_cast<int>(std::ceil(period / options.dxn - 1e-9));
    L.dxn = period / planes;
    for (int i = 0; i < planes; ++i) L.xn.push_back(-0.5 * period + i * L.dxn);
  }
  return L;
}

PlaneEvaluator::PlaneEvaluator(const NeighborhoodField& f, const EvalLayout& layout)
    : layout_(&layout), measure_(cell_measure(f)), dt_(f.lattice.dt) {
  require(f.lattice.h == layout.lattice.h && f.lattice.dt == layout.lattice.dt && f.base_dim() == layout.base_dim,
          ErrorKind::InvalidArgument, "field does not match the layout");
  const int nb = layout.base_dim;
  const int m = layout.m;
  bool first = true;
  for (std::size_t i = 0; i < f.entries.size();) {
    const auto& e = f.entries[i];
    std::size_t j = i;
    while (j < f.entries.size() && f.entries[j].idx == e.idx) ++j;
    std::size_t pos = 0;
    int parity = 0;
    for (int a = 0; a < nb; ++a) {
      int kappa = e.idx[a] - layout.k0[a];
      require(kappa >= 0 && kappa < m, ErrorKind::InvalidArgument, "field support exceeds the layout");
      pos = pos * m + kappa;
      parity += kappa;
    }
    SliceEntry base = e;
    base.slice = 0;
    columns_.push_back({pos, entry_phi(f, base), slices_.size(), slices_.size() + (j - i), parity % 2 ? -1.0 : 1.0});
    for (std::size_t k = i; k < j; ++k) {
      slices_.push_back(f.entries[k].slice);
      values_.push_back(f.entries[k].value);
      if (first) {
        slice_lo_ = slice_hi_ = f.entries[k].slice;
        first = false;
      }
      slice_lo_ = std::min(slice_lo_, f.entries[k].slice);
      slice_hi_ = std::max(slice_hi_, f.entries[k].slice);
    }
    i = j;
  }
  axis_phase_.resize(nb);
  for (int a = 0; a < nb; ++a) {
    axis_phase_[a].resize(m);
    for (int l = 0; l < m; ++l)
      axis_phase_[a][l] = expi(layout.x_coord(l) * layout.k0[a] * layout.lattice.h);
  }
}

void PlaneEvaluator::evaluate(double xn, std::vector<cplx>& out) const {
  const EvalLayout& L = *layout_;
  const int nb = L.base_dim;
  const int m = L.m;
  out.assign(L.plane_size(), cplx(0.0, 0.0));
  if (columns_.empty()) return;
  std::vector<cplx> slice_phase(slice_hi_ - slice_lo_ + 1);
  for (int j = slice_lo_; j <= slice_hi_; ++j) slice_phase[j - slice_lo_] = expi(xn * j * dt_);
  for (const auto& c : columns_) {
    cplx s(0.0, 0.0);
    for (std::size_t k = c.begin; k < c.end; ++k) s += values_[k] * slice_phase[slices_[k] - slice_lo_];
    out[c.position] = s * expi(xn * c.phi) * (c.sign * measure_);
  }
  std::vector<int> dims(nb, m);
  fft::execute(out, dims, +1);
  if (nb == 1) {
    for (int l = 0; l < m; ++l) out[l] *= axis_phase_[0][l];
  } else if (nb == 2) {
    for (int l0 = 0; l0 < m; ++l0)
      for (int l1 = 0; l1 < m; ++l1) out[static_cast<std::size_t>(l0) * m + l1] *= axis_phase_[0][l0] * axis_phase_[1][l1];
  } else {
    for (int l0 = 0; l0 < m; ++l0)
      for (int l1 = 0; l1 < m; ++l1) {
        cplx p01 = axis_phase_[0][l0] * axis_phase_[1][l1];
        std::size_t base = (static_cast<std::size_t>(l0) * m + l1) * m;
        for (int l2 = 0; l2 < m; ++l2) out[base + l2] *= p01 * axis_phase_[2][l2];
      }
  }
}

std::vector<std::uint8_t> plane_mask(const EvalLayout& L, double xn) {
  std::vector<std::uint8_t> mask(L.plane_size(), 1);
  if (!L.radius) return mask;
  const double r2 = *L.radius * *L.radius - xn * xn;
  const int m = L.m;
  for (std::size_t p = 0; p < mask.size(); ++p) {
    std::size_t q = p;
    double s = 0.0;
    for (int a = 0; a < L.base_dim; ++a) {
      double x = L.x_coord(static_cast<int>(q % m));
      s += x * x;
      q /= m;
    }
    mask[p] = s <= r2 * (1.0 + 1e-12);
  }
  return mask;
}

namespace {

template <class PlaneFn>
double integrate_planes(const EvalLayout& L, PlaneFn fn) {
  std::vector<double> partial(L.xn.size(), 0.0);
#pragma omp parallel
  {
    std::vector<cplx> a, b;
#pragma omp for schedule(dynamic, 1)
    for (std::size_t i = 0; i < L.xn.size(); ++i) partial[i] = fn(L.xn[i], a, b);
  }
  double s = 0.0;
  for (double v : partial) s += v;
  return s * L.point_weight();
}

}  // namespace

double power_integral(const NeighborhoodField& f, double p, const EvalLayout& L) {
  PlaneEvaluator ef(f, L);
  return integrate_planes(L, [&](double xn, std::vector<cplx>& a, std::vector<cplx>&) {
    ef.evaluate(xn, a);
    auto mask = plane_mask(L, xn);
    return kernels::power_sum(a, p, mask, kernels::Exec::serial);
  });
}

double product_power_integral(const NeighborhoodField& f, const NeighborhoodField& g, double p,
                              const EvalLayout& L) {
  PlaneEvaluator ef(f, L), eg(g, L);
  return integrate_planes(L, [&](double xn, std::vector<cplx>& a, std::vector<cplx>& b) {
    ef.evaluate(xn, a);
    eg.evaluate(xn, b);
    auto mask = plane_mask(L, xn);
    return kernels::product_power_sum(a, b, p, mask, kernels::Exec::serial);
  });
}

double trace_constant(const NeighborhoodField& f, double R, const EvalOptions& options) {
  const NeighborhoodField* fs[] = {&f};
  return std::sqrt(power_integral(f, 2.0, make_layout(fs, R, options))) / (std::sqrt(R) * spectral_norm(f));
}

}  // namespace rlab

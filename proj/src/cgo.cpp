#include "rlab/cgo.hpp"

#include <array>
#include <cmath>

#include "rlab/error.hpp"
#include "rlab/kernels.hpp"
#include "rlab/random.hpp"
#include "rlab/rotation.hpp"

namespace rlab {

namespace {

double radius_of(std::span<const double> x) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return std::sqrt(r2);
}

Field real_part(Field f) {
  for (auto& v : f.values) v = cplx(v.real(), 0.0);
  return f;
}

// |p|^{2b} on unguarded lattice points, 0 on the guarded ones.
std::vector<double> unguarded_weights(const std::vector<cplx>& p, double tau, double b) {
  double guard = kGuardFraction * tau * tau;
  std::vector<double> w(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    double a = std::abs(p[k]);
    w[k] = a < guard ? 0.0 : std::pow(a, 2.0 * b);
  }
  return w;
}

double weighted_norm(const std::vector<cplx>& uhat, const std::vector<double>& w, double cell) {
  return std::sqrt(kernels::weighted_mass(uhat, w) * cell);
}

double lagrange_weight(int i, double t) {
  // cubic Lagrange basis on nodes -1, 0, 1, 2
  switch (i) {
    case 0: return -t * (t - 1.0) * (t - 2.0) / 6.0;
    case 1: return (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    case 2: return -(t + 1.0) * t * (t - 2.0) / 2.0;
    default: return (t + 1.0) * t * (t - 1.0) / 6.0;
  }
}

Field upsample(const Field& u, int factor) {
  Field uh = to_frequency(u);
  const FourierGrid& g = u.grid;
  FourierGrid big = make_grid(g.dim, g.n * factor, g.box_radius, 30);
  Field out = zeros(big, Representation::frequency);
  double gain = std::pow(static_cast<double>(factor), g.dim / 2.0);
  std::vector<int> idx(g.dim);
  for (std::size_t k = 0; k < uh.values.size(); ++k) {
    std::size_t rem = k, target = 0;
    for (int a = g.dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % g.n);
      rem /= g.n;
    }
    std::size_t stride = 1;
    for (int a = g.dim - 1; a >= 0; --a) {
      int s = g.freq_index(idx[a]);
      int slot = s >= 0 ? s : s + big.n;
      target += stride * slot;
      stride *= big.n;
    }
    out.values[target] = gain * uh.values[k];
  }
  return to_physical(out);
}

}  // namespace

ConductivityField make_conductivity(const Field& gamma, double lower_bound) {
  require(lower_bound > 0.0, ErrorKind::InvalidArgument, "lower bound must be positive");
  Field g = to_physical(gamma);
  std::vector<double> x(g.grid.dim);
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    const cplx v = g.values[k];
    require(std::abs(v.imag()) <= 1e-12 * std::max(1.0, std::abs(v.real())), ErrorKind::InvalidArgument,
            "conductivity must be real");
    if (v.real() < lower_bound)
      throw Error(ErrorKind::PositivityViolation, "conductivity sample below the lower bound");
    g.grid.point(k, x);
    if (radius_of(x) > g.grid.box_radius / 2 && std::abs(v.real() - 1.0) > 1e-12)
      throw Error(ErrorKind::SupportViolation, "conductivity differs from 1 outside radius L/2");
  }
  return ConductivityField{real_part(g), lower_bound};
}

ConductivityField bump_conductivity(const FourierGrid& grid, double amplitude, double radius) {
  require(radius > 0.0 && radius <= grid.box_radius / 2, ErrorKind::InvalidArgument,
          "bump radius must lie in (0, L/2]");
  Field g = sample(grid, [&](std::span<const double> x) {
    return cplx(1.0 + amplitude * bump_shape(BumpKind::smooth_exponential, radius_of(x) / radius), 0.0);
  });
  double c = 1.0 + std::min(amplitude, 0.0);
  return make_conductivity(g, c > 0.0 ? 0.5 * c : 1e-12);
}

Field potential_from_conductivity(const ConductivityField& gamma, PotentialForm form) {
  Field g = to_physical(gamma.gamma);
  for (const auto& v : g.values)
    if (v.real() < gamma.lower_bound)
      throw Error(ErrorKind::PositivityViolation, "conductivity sample below the lower bound");
  if (form == PotentialForm::laplacian) {
    Field s = g;
    for (auto& v : s.values) v = cplx(std::sqrt(v.real()), 0.0);
    Field lap = laplacian(s);
    for (std::size_t k = 0; k < lap.values.size(); ++k) lap.values[k] = cplx(lap.values[k].real() / s.values[k].real(), 0.0);
    return lap;
  }
  Field l = g;
  for (auto& v : l.values) v = cplx(std::log(v.real()), 0.0);
  Field q = scale(laplacian(l), 0.5);
  for (int j = 0; j < g.grid.dim; ++j) {
    Field dj = partial_derivative(l, j);
    for (std::size_t k = 0; k < q.values.size(); ++k) q.values[k] += 0.25 * dj.values[k].real() * dj.values[k].real();
  }
  return real_part(q);
}

double unguarded_xb_norm(const Field& u, const PhaseVector& z, double b) {
  Field uh = to_frequency(u);
  auto w = unguarded_weights(symbol_table(u.grid, z), z.tau, b);
  return weighted_norm(uh.values, w, u.grid.cell_volume());
}

double conjugated_residual(const Field& psi, const Field& q, const PhaseVector& z) {
  require(psi.grid == q.grid, ErrorKind::InvalidArgument, "psi and q live on different grids");
  std::vector<cplx> p = symbol_table(q.grid, z);
  auto w = unguarded_weights(p, z.tau, -0.5);
  Field qp = to_physical(q), pp = to_physical(psi);
  Field rhs = qp;
  for (std::size_t k = 0; k < rhs.values.size(); ++k) rhs.values[k] *= 1.0 + pp.values[k];
  Field r = to_frequency(rhs);
  Field ph = to_frequency(pp);
  for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] = p[k] * ph.values[k] - r.values[k];
  double qn = weighted_norm(to_frequency(qp).values, w, q.grid.cell_volume());
  double rn = weighted_norm(r.values, w, q.grid.cell_volume());
  if (qn == 0.0) return rn;
  return rn / qn;
}

NeumannResult neumann_solve(const Field& q, const PhaseVector& z, const NeumannOptions& options) {
  require(options.max_iter >= 1 && options.tol > 0.0, ErrorKind::InvalidArgument, "bad Neumann options");
  const FourierGrid& g = q.grid;
  const double cell = g.cell_volume();
  Field qp = to_physical(q);
  std::vector<cplx> p = symbol_table(g, z);
  auto w_minus = unguarded_weights(p, z.tau, -0.5);
  auto w_plus = unguarded_weights(p, z.tau, 0.5);
  const double guard = kGuardFraction * z.tau * z.tau;

  NeumannResult out{zeros(g), {}};
  NeumannReport& rep = out.report;
  if (options.precheck) {
    rep.precheck_norm = mult_operator_norm(qp, z).value;
    if (*rep.precheck_norm >= 1.0) rep.warning = "mult_operator_norm(q) >= 1; the Neumann series may not converge";
  }
  const double qn = weighted_norm(to_frequency(qp).values, w_minus, cell);
  if (qn == 0.0) {
    rep.iterations = 1;
    rep.residual_history.push_back(0.0);
    rep.increment_norms.push_back(0.0);
    return out;
  }

  Field psi = zeros(g);
  Field psi_hat = zeros(g, Representation::frequency);
  int growth = 0;
  for (int it = 1; it <= options.max_iter; ++it) {
    Field rhs = qp;
    for (std::size_t k = 0; k < rhs.values.size(); ++k) rhs.values[k] *= 1.0 + psi.values[k];
    Field next_hat = to_frequency(rhs);
    for (std::size_t k = 0; k < p.size(); ++k)
      next_hat.values[k] = std::abs(p[k]) < guard ? cplx(0.0, 0.0) : next_hat.values[k] / p[k];
    Field diff_hat = subtract(next_hat, psi_hat);
    double inc = weighted_norm(diff_hat.values, w_plus, cell);
    Field next = to_physical(next_hat);

    // Off the guarded set p psi_new = q (1 + psi_old), so the residual is q (psi_old - psi_new).
    Field r = qp;
    for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] *= psi.values[k] - next.values[k];
    double res = weighted_norm(to_frequency(r).values, w_minus, cell) / qn;
    if (!std::isfinite(res) || !std::isfinite(inc)) throw Error(ErrorKind::Divergence, "Neumann iterate is not finite");

    if (!rep.increment_norms.empty() && rep.increment_norms.back() > 0.0)
      rep.contraction_estimate = std::max(rep.contraction_estimate, inc / rep.increment_norms.back());
    if (!rep.residual_history.empty()) growth = res > rep.residual_history.back() ? growth + 1 : 0;
    rep.increment_norms.push_back(inc);
    rep.residual_history.push_back(res);
    psi = std::move(next);
    psi_hat = std::move(next_hat);
    rep.iterations = it;
    rep.residual = res;
    if (growth >= options.divergence_window)
      throw Error(ErrorKind::Divergence, "Neumann residual grew for " + std::to_string(growth) + " iterations");
    if (res <= options.tol) break;
    if (it == options.max_iter) throw Error(ErrorKind::MaxIterExceeded, "Neumann series did not reach tolerance");
  }
  rep.first_term_norm = rep.increment_norms.front();
  rep.psi_norm = weighted_norm(psi_hat.values, w_plus, cell);
  out.psi = std::move(psi);
  return out;
}

namespace {

Field sweep_term(const Field& f, int axis, SweepTerm term) {
  if (term == SweepTerm::derivative) return real_part(partial_derivative(f, axis));
  Field q = to_physical(f);
  for (auto& v : q.values) v = cplx(std::norm(v), 0.0);
  return q;
}

void check_unit_support(const Field& f) {
  Field fp = to_physical(f);
  double mx = max_abs(fp);
  std::vector<double> x(fp.grid.dim);
  for (std::size_t k = 0; k < fp.values.size(); ++k) {
    fp.grid.point(k, x);
    if (radius_of(x) > 1.0 && std::abs(fp.values[k]) > 1e-12 * mx)
      throw Error(ErrorKind::SupportViolation, "f is not supported in the unit ball");
  }
}

void mean_se(const std::vector<double>& v, double& mean, double& se) {
  double s = 0.0;
  for (double x : v) s += x;
  mean = s / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  se = v.size() > 1 ? std::sqrt(ss / (v.size() - 1) / v.size()) : 0.0;
}

}  // namespace

ExpectationResult expectation_sweep(const Field& f, int axis, const std::vector<double>& M_list, int samples,
                                    std::uint64_t seed, const ExpectationOptions& options) {
  require(samples >= 20, ErrorKind::InvalidArgument, "expectation_sweep needs at least 20 samples");
  require(axis >= 0 && axis < f.grid.dim, ErrorKind::InvalidArgument, "axis out of range");
  check_unit_support(f);
  Field q = sweep_term(f, axis, options.term);
  ExpectationResult out;
  for (std::size_t m = 0; m < M_list.size(); ++m) {
    const double M = M_list[m];
    require(M > 0.0, ErrorKind::InvalidArgument, "M must be positive");
    std::vector<ExpectationSample> level(samples);
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < samples; ++j) {
      Rng rng = make_rng(seed, m, j);
      std::uint64_t rot_seed = rng();
      double tau = uniform(rng, M, 2.0 * M);
      PhaseVector z = make_phase(haar_rotation(rot_seed, f.grid.dim), tau);
      PowerIterationOptions power = options.power;
      power.seed = mix_seed(seed, (m << 32) ^ static_cast<std::uint64_t>(j));
      level[j] = ExpectationSample{z.rotation, tau, xb_norm(q, z, {-0.5, NormMode::inhomogeneous, std::nullopt}),
                                   mult_operator_norm(q, z, power).value};
    }
    ExpectationAggregate agg;
    agg.M = M;
    agg.samples = samples;
    std::vector<double> qn, mq;
    for (const auto& s : level) {
      qn.push_back(s.q_norm);
      mq.push_back(s.mq_norm);
    }
    mean_se(qn, agg.mean_qnorm, agg.se_qnorm);
    mean_se(mq, agg.mean_mqnorm, agg.se_mqnorm);
    out.aggregates.push_back(agg);
    out.samples.push_back(std::move(level));
  }
  return out;
}

LowFrequencyCheck low_frequency_check(const Field& f, int axis, const PhaseVector& z, double M,
                                      const PowerIterationOptions& power) {
  LowFrequencyCheck c;
  c.A = std::pow(M, 0.25);
  const double A = c.A;
  Field g = apply_multiplier(partial_derivative(f, axis), [A](std::span<const double> xi) {
    return cplx(radius_of(xi) <= A ? 1.0 : 0.0, 0.0);
  });
  g = real_part(to_physical(g));
  c.op_norm = mult_operator_norm(g, z, power).value;
  c.sup_bound = max_abs(g) / z.modulus();
  c.shape_bound = A * A / M * lp_norm(f, f.grid.dim);
  return c;
}

Field directional_derivative(const Field& u, std::span<const double> w) {
  require(static_cast<int>(w.size()) == u.grid.dim, ErrorKind::InvalidArgument, "direction dimension mismatch");
  std::vector<double> dir(w.begin(), w.end());
  return apply_multiplier(u, [dir](std::span<const double> xi) {
    double s = 0.0;
    for (std::size_t j = 0; j < dir.size(); ++j) s += dir[j] * xi[j];
    return cplx(0.0, s);
  });
}

Field scale_rotate(const Field& u, const PhaseVector& z, std::optional<FourierGrid> target) {
  const FourierGrid& g = u.grid;
  const int d = g.dim;
  require(z.dim() == d, ErrorKind::InvalidArgument, "phase vector dimension does not match grid");
  FourierGrid tg = target.value_or(make_grid(d, g.n, z.tau * g.box_radius));
  require(tg.dim == d, ErrorKind::InvalidArgument, "target grid dimension mismatch");

  Field up = to_physical(u);
  double total = l2_mass(up), outside = 0.0;
  {
    std::vector<double> x(d);
    for (std::size_t k = 0; k < up.values.size(); ++k) {
      g.point(k, x);
      if (radius_of(x) > g.box_radius - 2.0 * g.spacing()) outside += std::norm(up.values[k]) * g.cell_volume();
    }
  }
  if (total > 0.0 && outside > 1e-10 * total)
    throw Error(ErrorKind::ResolutionLoss, "field mass reaches the edge of its box; rotation would lose it");

  int factor = 4;
  while (factor > 1 && std::pow(static_cast<double>(g.n * factor), d) > static_cast<double>(1u << 24)) factor /= 2;
  Field fine = factor > 1 ? upsample(up, factor) : up;
  const FourierGrid& fg = fine.grid;
  const double h = fg.spacing();
  const double gain = std::pow(z.tau, -d);
  const Eigen::MatrixXd& U = z.rotation;

  Field out = zeros(tg);
  std::vector<std::size_t> strides(d);
  {
    std::size_t s = 1;
    for (int a = d - 1; a >= 0; --a) {
      strides[a] = s;
      s *= fg.n;
    }
  }
  const std::size_t total_pts = out.values.size();
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < total_pts; ++k) {
    std::vector<double> x(d), y(d), t(d);
    std::vector<int> base(d);
    tg.point(k, x);
    bool inside = true;
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += U(i, j) * x[j];
      y[i] = s / z.tau;
      if (std::abs(y[i]) > g.box_radius - 2.0 * g.spacing()) inside = false;
    }
    if (!inside) continue;
    for (int i = 0; i < d; ++i) {
      double pos = (y[i] + fg.box_radius) / h;
      base[i] = static_cast<int>(std::floor(pos));
      t[i] = pos - base[i];
    }
    cplx acc(0.0, 0.0);
    const int corners = 1 << (2 * d);
    for (int c = 0; c < corners; ++c) {
      double w = 1.0;
      std::size_t flat = 0;
      for (int i = 0; i < d; ++i) {
        int off = (c >> (2 * i)) & 3;
        w *= lagrange_weight(off, t[i]);
        int j = base[i] + off - 1;
        j = ((j % fg.n) + fg.n) % fg.n;
        flat += strides[i] * j;
      }
      acc += w * fine.values[flat];
    }
    out.values[k] = gain * acc;
  }
  double expected = std::pow(z.tau, -d) * total;
  if (total > 0.0 && l2_mass(out) < (1.0 - 1e-4) * expected)
    throw Error(ErrorKind::ResolutionLoss, "target grid does not cover the rescaled support");
  return out;
}

}  // namespace rlab

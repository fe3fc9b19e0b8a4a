#include "rlab/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "rlab/bilinear.hpp"
#include "rlab/cgo.hpp"
#include "rlab/constants.hpp"
#include "rlab/error.hpp"
#include "rlab/extension.hpp"
#include "rlab/incidence.hpp"
#include "rlab/induction.hpp"
#include "rlab/random.hpp"
#include "rlab/rotation.hpp"
#include "rlab/wavepacket.hpp"

namespace fs = std::filesystem;

namespace rlab {

namespace {

[[noreturn]] void bad_value(const ExperimentConfig& c, const std::string& key, const std::string& msg) {
  auto it = c.entries.find(key);
  std::string where = it == c.entries.end() ? "" : " (line " + std::to_string(it->second.line) + ")";
  throw Error(ErrorKind::ConfigParse, "key '" + key + "': " + msg + where);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Runs fn(0..count-1) on up to `jobs` threads; the first failing cell (by index) rethrows.
template <class Fn>
void for_each_cell(int count, int jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
  for (int j = 0; j < count; ++j) {
    try {
      fn(j);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<double> dyadic(int from, int to) {
  std::vector<double> v;
  for (int k = from; k <= to; ++k) v.push_back(std::ldexp(1.0, -k));
  return v;
}

SurfaceGraph surface_from(const ExperimentConfig& c) {
  int n = static_cast<int>(c.integer("surface.n", 2));
  std::string kind = c.text("surface.kind", "paraboloid");
  if (kind == "paraboloid") return make_paraboloid(n, c.real("surface.domain_radius", 1.0));
  if (kind == "hemisphere") return make_hemisphere(n, c.real("surface.domain_radius", 0.75));
  if (kind == "elliptic")
    return make_elliptic(n, c.real("surface.epsilon", 0.1), c.integer("surface.seed", 0),
                         c.real("surface.domain_radius", 1.0));
  bad_value(c, "surface.kind", "expected paraboloid, hemisphere or elliptic, got '" + kind + "'");
}

FourierGrid grid_from(const ExperimentConfig& c) {
  return make_grid(static_cast<int>(c.integer("grid.dim", 3)), static_cast<int>(c.integer("grid.n", 32)),
                   c.real("grid.box_radius", M_PI));
}

double euclid(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Number of steps k with v[k] >= v[k-1].
int non_decreasing_steps(const std::vector<double>& v) {
  int bad = 0;
  for (std::size_t k = 1; k < v.size(); ++k) bad += v[k] >= v[k - 1];
  return bad;
}

ExperimentResult run_cgo(const ExperimentConfig& c, int jobs) {
  FourierGrid g = grid_from(c);
  std::string form = c.text("conductivity.form", "laplacian");
  if (form != "laplacian" && form != "divergence")
    bad_value(c, "conductivity.form", "expected laplacian or divergence, got '" + form + "'");
  auto gamma = bump_conductivity(g, c.real("conductivity.amplitude", 0.1), c.real("conductivity.radius", 1.5));
  Field q = potential_from_conductivity(gamma, form == "laplacian" ? PotentialForm::laplacian : PotentialForm::divergence);
  auto taus = c.reals("sweep.tau", {8.0, 16.0, 32.0});
  int samples = static_cast<int>(c.integer("sweep.samples", 20));
  if (samples < 1) bad_value(c, "sweep.samples", "must be positive");
  NeumannOptions opt;
  opt.max_iter = static_cast<int>(c.integer("solver.max_iter", 200));
  opt.tol = c.real("solver.tol", 1e-7);

  std::vector<std::vector<NeumannReport>> reports(samples);
  for_each_cell(samples, jobs, [&](int s) {
    Eigen::MatrixXd U = haar_rotation(mix_seed(c.seed, s), g.dim);
    for (double tau : taus) reports[s].push_back(neumann_solve(q, make_phase(U, tau), opt).report);
  });

  ExperimentResult r;
  r.table = make_table("cgo");
  double worst = 0.0;
  int decreasing = 0;
  for (int s = 0; s < samples; ++s) {
    std::vector<double> norms;
    for (std::size_t t = 0; t < taus.size(); ++t) {
      const auto& rep = reports[s][t];
      r.table.rows.push_back({double(s), taus[t], double(rep.iterations), rep.residual, rep.contraction_estimate,
                              rep.psi_norm});
      worst = std::max(worst, rep.residual);
      norms.push_back(rep.psi_norm);
    }
    decreasing += non_decreasing_steps(norms) == 0;
  }
  r.checks.push_back(make_check("max_residual", worst, "<=", opt.tol));
  r.checks.push_back(make_check("decreasing_fraction", double(decreasing) / samples, ">=",
                                c.real("check.min_decreasing", 0.75)));
  r.plot = {PlotKind::trend, "tau", {{"psi_norm", ""}}, "", "corrector norm against tau"};
  return r;
}

ExperimentResult run_expectation(const ExperimentConfig& c, int) {
  FourierGrid g = grid_from(c);
  const double radius = c.real("field.bump_radius", 0.9);
  Field f = sample(g, [&](std::span<const double> x) {
    return cplx(bump_shape(BumpKind::smooth_exponential, euclid(x) / radius), 0.0);
  });
  std::string term = c.text("field.term", "derivative");
  if (term != "derivative" && term != "square")
    bad_value(c, "field.term", "expected derivative or square, got '" + term + "'");
  ExpectationOptions opt;
  opt.term = term == "derivative" ? SweepTerm::derivative : SweepTerm::square;
  opt.power = {static_cast<int>(c.integer("power.iters", 60)), c.real("power.tol", 1e-6),
               static_cast<int>(c.integer("power.restarts", 1)), 0};
  auto res = expectation_sweep(f, static_cast<int>(c.integer("field.axis", 0)), c.reals("sweep.M", {8, 16, 32, 64}),
                               static_cast<int>(c.integer("sweep.samples", 50)), c.seed, opt);

  ExperimentResult r;
  r.table = make_table("expectation");
  std::vector<double> qn, mq;
  for (const auto& a : res.aggregates) {
    r.table.rows.push_back({a.M, double(a.samples), a.mean_qnorm, a.se_qnorm, a.mean_mqnorm, a.se_mqnorm});
    qn.push_back(a.mean_qnorm);
    mq.push_back(a.mean_mqnorm);
  }
  r.checks.push_back(make_check("mean_qnorm_non_decreasing_steps", non_decreasing_steps(qn), "==", 0));
  r.checks.push_back(make_check("mean_mqnorm_non_decreasing_steps", non_decreasing_steps(mq), "==", 0));
  r.plot = {PlotKind::trend, "M", {{"mean_qnorm", "se_qnorm"}, {"mean_mqnorm", "se_mqnorm"}}, "",
            "expected norms against M"};
  return r;
}

ExperimentResult run_bilinear(const ExperimentConfig& c, int) {
  SurfaceGraph s = surface_from(c);
  const int n = s.ambient_dim;
  const double pp = c.real("sweep.p_prime", n / (n - 1.0));
  std::string regime = c.text("sweep.regime", "bilinear");
  KEstimateOptions opt;
  if (regime == "tomas_stein") opt.regime = Regime::tomas_stein;
  else if (regime != "bilinear") bad_value(c, "sweep.regime", "expected bilinear or tomas_stein, got '" + regime + "'");
  opt.cap_radius = c.real("sweep.cap_radius", 0.25);
  const bool ts = opt.regime == Regime::tomas_stein;
  auto mus = c.reals("sweep.mu", n == 2 ? dyadic(4, 7) : dyadic(3, 6));
  auto nus = c.reals("sweep.nu", ts ? dyadic(1, 4) : (n == 2 ? dyadic(2, 7) : dyadic(2, 6)));
  auto k = k_estimate_and_fit(s, pp, mus, nus, static_cast<int>(c.integer("sweep.candidates", 2)), c.seed, opt);

  ExperimentResult r;
  r.table = make_table("bilinear");
  for (const auto& d : k.cell_max)
    r.table.rows.push_back({double(d.n), d.surface, d.p_prime, d.mu, d.nu, std::string(to_string(d.construction)),
                            d.ratio});
  // predicted rates mu^{n/2p} nu^{1/p}, or mu^{(n+1)/2p} in the Tomas-Stein regime
  const double inv_p = 1.0 - 1.0 / pp;
  const double e_mu = c.real("check.e_mu", ts ? (n + 1) * inv_p / 2 : n * inv_p / 2);
  const double e_nu = c.real("check.e_nu", ts ? 0.0 : inv_p);
  const double tol = c.real("check.tolerance", 0.1);
  r.checks.push_back(make_check("e_mu_deviation", std::abs(k.e_mu - e_mu), "<=", tol));
  r.checks.push_back(make_check("e_nu_deviation", std::abs(k.e_nu - e_nu), "<=", tol));
  r.plot = {PlotKind::loglog, "mu", {{"ratio", ""}}, "nu", "largest bilinear ratio per (mu, nu) cell"};
  return r;
}

ExperimentResult run_wavepacket(const ExperimentConfig& c, int) {
  SurfaceGraph s = surface_from(c);
  const int n = s.ambient_dim;
  const double R = c.real("field.R", 64.0);
  const double width = c.real("field.width", n == 2 ? 0.05 : 0.0);
  const double h = c.real("field.h", 1.0 / (20.0 * std::sqrt(R)));
  std::vector<double> center(n - 1, c.real("field.center", 0.1));
  auto f = make_neighborhood(s, {h, width > 0.0 ? width / 4.0 : 1.0}, center,
                             c.real("field.cap_radius", n == 2 ? 0.5 : 0.3), width, Profile::random_gaussian(c.seed));
  auto coef = wp_decompose(f, R, c.real("field.drop", 1e-12));
  require(!coef.entries.empty(), ErrorKind::InvalidArgument, "the field has no packet coefficients");

  double mass = 0.0;
  for (const auto& e : coef.entries) mass += std::norm(e.a);
  const double fm = std::pow(spectral_norm(f), 2);
  const double parseval = std::abs(mass - fm) / fm;

  const int probes = static_cast<int>(c.integer("audit.probes", 200));
  Rng rng = make_rng(c.seed, 1);
  std::vector<double> pts;
  for (int j = 0; j < probes * n; ++j) pts.push_back(uniform(rng, -R, R));
  auto direct = extension_eval(f, pts), packets = wp_reconstruct(coef, pts);
  double diff = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < direct.size(); ++j) {
    diff = std::max(diff, std::abs(direct[j] - packets[j]));
    scale = std::max(scale, std::abs(direct[j]));
  }

  const PacketEntry* top = &coef.entries.front();
  for (const auto& e : coef.entries)
    if (std::abs(e.a) > std::abs(top->a)) top = &e;
  auto audit = packet_decay_audit(coef, *top, c.real("audit.xn", R / 2), c.reals("audit.multiples", {2.0, 4.0, 8.0}));

  ExperimentResult r;
  r.table = make_table("wavepacket");
  for (std::size_t k = 0; k < audit.distances.size(); ++k)
    r.table.rows.push_back({audit.distances[k], audit.amplitudes[k]});
  r.checks.push_back(make_check("parseval_relative_error", parseval, "<=", c.real("check.parseval", 1e-8)));
  r.checks.push_back(make_check("reconstruction_relative_error", scale > 0 ? diff / scale : diff, "<=",
                                c.real("check.reconstruction", 1e-6)));
  r.checks.push_back(make_check("decay_order", audit.exponent, ">=", c.real("check.decay_order", 4.0)));
  r.plot = {PlotKind::loglog, "distance", {{"amplitude", ""}}, "", "packet amplitude off the tube axis"};

  auto values = std::make_shared<std::vector<cplx>>();
  ResultTable index = packet_index_table(n);
  for (const auto& e : coef.entries) {
    values->push_back(e.a);
    std::vector<Cell> row{double(e.cap)};
    for (double w : coef.omega(e)) row.emplace_back(w);
    index.rows.push_back(std::move(row));
  }
  r.artifacts.push_back({"coefficients.rlab", [values, n, R](const std::string& path) {
                           write_block(path, n, static_cast<long long>(values->size()), R, *values);
                         }});
  r.artifacts.push_back({"coefficients_index.csv", [index](const std::string& path) { write_csv(path, index); }});
  return r;
}

ExperimentResult run_kakeya(const ExperimentConfig& c, int jobs) {
  const int n = static_cast<int>(c.integer("incidence.n", 2));
  const double R = c.real("incidence.R", kKakeyaR), delta = c.real("incidence.delta", kKakeyaDelta);
  const int configs = static_cast<int>(c.integer("incidence.configs", 20));
  if (configs < 1) bad_value(c, "incidence.configs", "must be positive");
  std::string family = c.text("incidence.family", "random");
  if (family != "random" && family != "slab")
    bad_value(c, "incidence.family", "expected random or slab, got '" + family + "'");
  RandomConfigOptions gen;
  gen.n1 = static_cast<int>(c.integer("incidence.n1", gen.n1));
  gen.n2 = static_cast<int>(c.integer("incidence.n2", gen.n2));
  gen.bush_fraction = c.real("incidence.bush_fraction", gen.bush_fraction);
  gen.cap_radius = c.real("incidence.cap_radius", gen.cap_radius);

  KakeyaOptions opt;
  if (!c.has("kakeya.C") || !c.has("kakeya.Cdelta")) {
    Constants k = load_constants(c.text("kakeya.constants", default_constants_path()));
    opt.C = k.get("kakeya_C_n" + std::to_string(n));
    opt.Cdelta = k.get("kakeya_Cdelta");
  }
  opt.C = c.real("kakeya.C", opt.C);
  opt.Cdelta = c.real("kakeya.Cdelta", opt.Cdelta);
  opt.cap_radius = gen.cap_radius;

  // configuration j uses seed + j
  std::vector<std::vector<KakeyaCheck>> results(configs);
  for_each_cell(configs, jobs, [&](int j) {
    std::uint64_t seed = c.seed + static_cast<std::uint64_t>(j);
    auto config = family == "slab" ? slab_incidence_config(n, R, delta, seed, gen)
                                   : random_incidence_config(n, R, delta, seed, gen);
    results[j] = kakeya_sweep(config, incidence_stats(config), opt);
  });

  ExperimentResult r;
  r.table = make_table("incidence");
  int violations = 0;
  for (const auto& list : results)
    for (const auto& k : list) {
      r.table.rows.push_back({R, delta, k.mu2, k.lambda1, double(k.class_size), double(k.T2), k.lhs, k.rhs});
      violations += k.lhs > k.rhs;
    }
  r.checks.push_back(make_check("violations", violations, "==", 0));
  r.plot = {PlotKind::trend, "mu2", {{"lhs", ""}, {"rhs", ""}}, "", "incidence count and bound per class"};
  return r;
}

ExperimentResult run_induction(const ExperimentConfig& c, int) {
  SurfaceGraph s = surface_from(c);
  const int n = s.ambient_dim;
  InductionOptions opt;
  opt.cap_radius = c.real("sweep.cap_radius", 0.25);
  auto res = induction_probe(s, c.real("sweep.nu", 1.0 / 16), c.reals("sweep.R", {16, 32, 64, 128, 256}),
                             c.real("sweep.p_prime", n / (n - 1.0)), static_cast<int>(c.integer("sweep.candidates", 3)),
                             c.seed, opt);
  ExperimentResult r;
  r.table = make_table("induction");
  for (const auto& row : res.rows) r.table.rows.push_back({row.R, row.K, row.candidate});
  if (res.exponent) r.checks.push_back(make_check("growth_exponent", *res.exponent, "<=", c.real("check.max_growth", 0.1)));
  r.plot = {PlotKind::loglog, "R", {{"K", ""}}, "", "localised bilinear constant against R"};
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(os), ErrorKind::Unwritable, "cannot open " + p.string());
  os << text;
  require(static_cast<bool>(os), ErrorKind::Unwritable, "write failed for " + p.string());
}

std::string checks_text(const std::vector<Check>& checks) {
  std::string out;
  for (const auto& k : checks)
    out += k.name + ": " + fmt("%.10g", k.value) + " " + k.relation + " " + fmt("%.10g", k.bound) + " " +
           (k.pass ? "PASS" : "FAIL") + "\n";
  return out;
}

}  // namespace

Check make_check(const std::string& name, double value, const std::string& relation, double bound) {
  bool pass = relation == "<=" ? value <= bound : relation == ">=" ? value >= bound : value == bound;
  return {name, value, relation, bound, pass};
}

ExperimentResult execute(const ExperimentConfig& config, int jobs) {
  require(jobs >= 1, ErrorKind::InvalidArgument, "jobs must be positive");
  const std::string& e = config.experiment;
  if (e == "cgo") return run_cgo(config, jobs);
  if (e == "expectation") return run_expectation(config, jobs);
  if (e == "bilinear") return run_bilinear(config, jobs);
  if (e == "wavepacket") return run_wavepacket(config, jobs);
  if (e == "kakeya") return run_kakeya(config, jobs);
  if (e == "induction") return run_induction(config, jobs);
  throw Error(ErrorKind::ConfigParse, "unknown experiment '" + e + "'");
}

std::string output_root(const ExperimentConfig& config) {
  if (const char* env = std::getenv("RLAB_OUT"); env && *env) return env;
  return config.output.value_or("rlab_out");
}

std::string run_name(const ExperimentConfig& config) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016" PRIx64, fnv1a64(config.canonical() + "version = " + kVersion + "\n"));
  return config.experiment + "-" + hex;
}

RunOutcome run(ExperimentConfig config, const RunOptions& options) {
  if (options.seed) config.seed = *options.seed;
  RunOutcome out;
  fs::path dir = fs::path(output_root(config)) / run_name(config);
  out.directory = dir.string();
  fs::path done = dir / "done";
  if (!options.force && fs::exists(done)) {
    std::string marker = read_file(done);
    out.reused = true;
    out.exit_code = marker.find("exit_code = 2") != std::string::npos ? 2 : 0;
    return out;
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorKind::Unwritable, "cannot create " + dir.string());
  fs::remove(done, ec);
  write_file(dir / "config.echo", config.canonical());
  write_file(dir / "version.txt", std::string(kVersion) + "\ncompiler " + __VERSION__ + "\n");

  const int saved = omp_get_max_threads();
  omp_set_num_threads(std::max(1, options.jobs));
  try {
    out.result = execute(config, std::max(1, options.jobs));
  } catch (const Error& e) {
    omp_set_num_threads(saved);
    throw Error(e.kind(), "experiment '" + config.experiment + "': " + e.what());
  }
  omp_set_num_threads(saved);

  const auto& r = out.result;
  write_csv((dir / (r.table.schema + ".csv")).string(), r.table);
  if (!r.table.empty()) out.fit = emit_plot(r.table, r.plot, (dir / "figure.svg").string()).fit;
  for (const auto& a : r.artifacts) a.write((dir / a.file).string());
  write_file(dir / "checks.txt", checks_text(r.checks));
  out.exit_code = std::all_of(r.checks.begin(), r.checks.end(), [](const Check& k) { return k.pass; }) ? 0 : 2;
  write_file(done, "exit_code = " + std::to_string(out.exit_code) + "\n");
  return out;
}

}  // namespace rlab

// Measures the frozen constants used by the tests and the acceptance run and
// writes them to the constants file. Calibration seeds are disjoint from the
// seeds the checks use (tests from 500, acceptance from 1000).
#include <cmath>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "rlab/bilinear.hpp"
#include "rlab/constants.hpp"
#include "rlab/error.hpp"
#include "rlab/extension.hpp"
#include "rlab/incidence.hpp"
#include "rlab/radon.hpp"
#include "rlab/xb.hpp"

using namespace rlab;

namespace {

std::vector<double> dyadic(int from, int to) {
  std::vector<double> v;
  for (int k = from; k <= to; ++k) v.push_back(std::ldexp(1.0, -k));
  return v;
}

void report(const char* name, double measured, double value) {
  std::fprintf(stderr, "%-22s measured %.6g  frozen %.6g\n", name, measured, value);
}

double trace_max(int n) {
  double worst = 0.0;
  SurfaceGraph s = make_paraboloid(n);
  std::vector<double> c(n - 1, 0.0);
  c[0] = -0.3;
  for (double R : {16.0, 32.0, 64.0}) {
    SliceLattice lat{1.0 / (2 * R), 1.0};
    for (int j = 0; j < 4; ++j) {
      Profile p = j == 0 ? Profile::constant_one() : Profile::random_gaussian(j);
      worst = std::max(worst, trace_constant(make_neighborhood(s, lat, c, 0.25, 0.0, p), R));
    }
  }
  return worst;
}

double radon_l2_max(int n) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto p = separated_density_pair(n, 16, seed);
    auto c = l2_bilinear_check(p.f, p.g, 16);
    worst = std::max(worst, c.lhs / c.rhs);
  }
  return worst;
}

double bilinear_upper_max(int n) {
  const double d = 0.05;
  KEstimate k = n == 2 ? k_estimate_and_fit(make_paraboloid(2), 2.0, dyadic(4, 7), dyadic(2, 7), 2, 101)
                       : k_estimate_and_fit(make_paraboloid(3), 1.5, dyadic(3, 6), dyadic(2, 6), 1, 103);
  const double p = n;  // p' = n/(n-1)
  double worst = 0.0;
  for (const auto& r : k.rows)
    worst = std::max(worst, r.ratio / (std::pow(r.mu, n / (2 * p) - d) * std::pow(r.nu, 1 / p - d)));
  return worst;
}

struct IncidenceMax {
  double kakeya = 0.0;
  double relations = 0.0;
};

IncidenceMax incidence_max(int n, int configs, double Cdelta) {
  IncidenceMax out;
  KakeyaOptions o;
  o.C = 1.0;
  o.Cdelta = Cdelta;
  // seeds [0, configs) for the random family, [200, 200 + configs / 4) for the slab bush
  for (int j = 0; j < configs + configs / 4; ++j) {
    auto c = j < configs ? random_incidence_config(n, kKakeyaR, kKakeyaDelta, j)
                         : slab_incidence_config(n, kKakeyaR, kKakeyaDelta, 200 + j - configs);
    auto s = incidence_stats(c);
    for (const auto& k : kakeya_sweep(c, s, o)) out.kakeya = std::max(out.kakeya, k.lhs / k.rhs);
    for (const auto* fam : {&s.t1, &s.t2})
      for (const auto& r : fam->related)
        out.relations = std::max(out.relations, r.size() / std::log(kKakeyaR));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measure and freeze the calibration constants"};
  std::string out = default_constants_path();
  app.add_option("--out", out, "constants file to write");
  CLI11_PARSE(app, argc, argv);

  try {
    Constants k;
    auto freeze = [&](const std::string& name, double measured, double margin) {
      k.values[name] = measured * margin;
      report(name.c_str(), measured, k.values[name]);
    };
    for (int n : {2, 3}) {
      const std::string suffix = "_n" + std::to_string(n);
      freeze("trace_C" + suffix, trace_max(n), 1.25);
      freeze("radon_l2_C" + suffix, radon_l2_max(n), 2.0);
      freeze("bilinear_upper_C" + suffix, bilinear_upper_max(n), 1.5);
    }

    double lo = INFINITY, hi = 0.0;
    for (std::uint64_t j = 0; j < 20000; ++j)
      if (auto r = symbol_ratio_sample(7, j)) {
        lo = std::min(lo, *r);
        hi = std::max(hi, *r);
      }
    freeze("symbol_bracket_lo", lo, 0.8);
    freeze("symbol_bracket_hi", hi, 1.25);

    // R^{Cdelta delta} with Cdelta fixed at 1; C absorbs the rest.
    k.values["kakeya_Cdelta"] = 1.0;
    double relations = 0.0;
    for (int n : {2, 3}) {
      auto m = incidence_max(n, n == 2 ? 200 : 60, 1.0);
      freeze("kakeya_C_n" + std::to_string(n), m.kakeya, 2.0);
      relations = std::max(relations, m.relations);
    }
    freeze("incidence_log_C", relations, 1.5);

    save_constants(out, k,
                   "Generated by rlab_calibrate. Each value is the largest measured ratio on\n"
                   "calibration seeds times a safety margin (bracket_lo: smallest times 0.8).");
    std::fprintf(stderr, "wrote %s\n", out.c_str());
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

#include "rlab/induction.hpp"

#include <algorithm>
#include <cmath>

#include "rlab/bilinear.hpp"
#include "rlab/error.hpp"
#include "rlab/fit.hpp"
#include "rlab/random.hpp"

namespace rlab {

SliceLattice induction_lattice(double nu, double R) {
  return {1.0 / (2.0 * R), std::min(nu / 4.0, 1.0 / (2.0 * R))};
}

double localized_ratio(const NeighborhoodField& f_surface, const NeighborhoodField& g, double p_prime, double R,
                       const EvalOptions& eval) {
  return bilinear_ratio(f_surface, g, p_prime, R, eval) / std::sqrt(f_surface.lattice.dt);
}

InductionResult induction_probe(const SurfaceGraph& surface, double nu, const std::vector<double>& R_list,
                                double p_prime, int candidates, std::uint64_t seed, const InductionOptions& options) {
  require(nu > 0.0 && nu < 1.0, ErrorKind::InvalidArgument, "nu must lie in (0, 1)");
  require(candidates >= 1, ErrorKind::InvalidArgument, "need at least one candidate");
  for (double R : R_list)
    require(R >= (1.0 - 1e-12) / nu && R <= (1.0 + 1e-12) / (nu * nu), ErrorKind::InvalidArgument,
            "R must lie in [1/nu, 1/nu^2]");
  const int n = surface.ambient_dim;
  const auto c1 = first_cap_center(n), c2 = second_cap_center(n);
  InductionResult out;
  for (std::size_t level = 0; level < R_list.size(); ++level) {
    const double R = R_list[level];
    const SliceLattice lat = induction_lattice(nu, R);
    InductionRow row;
    row.R = R;
    for (int c = 0; c < candidates; ++c) {
      Profile pf = Profile::constant_one(), pg = Profile::constant_one();
      double fr = options.cap_radius;
      std::string name = "constant";
      if (c == 1) {
        fr = std::max(1.0 / std::sqrt(R), 2.0 * lat.h);
        name = "packet";
      } else if (c >= 2) {
        std::uint64_t s = mix_seed(mix_seed(seed, level), c);
        pf = Profile::random_gaussian(mix_seed(s, 1));
        pg = Profile::random_gaussian(mix_seed(s, 2));
        name = "random";
      }
      auto f = make_neighborhood(surface, lat, c1, fr, 0.0, pf);
      for (auto& e : f.entries) e.value /= lat.dt;
      auto g = make_neighborhood(surface, lat, c2, options.cap_radius, nu, pg);
      double K = localized_ratio(f, g, p_prime, R, options.eval);
      if (K > row.K) {
        row.K = K;
        row.candidate = name;
      }
    }
    out.rows.push_back(row);
  }
  if (out.rows.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& r : out.rows) {
      x.push_back(r.R);
      y.push_back(r.K);
    }
    auto fit = fit_power_law(x, y);
    out.exponent = fit.exponent;
    out.r2 = fit.r2;
  }
  return out;
}

}  // namespace rlab

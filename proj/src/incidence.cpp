#include "rlab/incidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "rlab/error.hpp"
#include "rlab/random.hpp"

namespace rlab {

Tube tube_through(std::span<const double> cap_center, std::span<const double> point, double R, double length) {
  const int n = static_cast<int>(point.size());
  require(static_cast<int>(cap_center.size()) == n - 1, ErrorKind::InvalidArgument, "cap center must have n-1 coordinates");
  Tube t;
  t.cap_center.assign(cap_center.begin(), cap_center.end());
  t.direction.resize(n);
  double norm = 1.0;
  for (double c : cap_center) norm += c * c;
  norm = std::sqrt(norm);
  for (int a = 0; a < n - 1; ++a) t.direction[a] = -cap_center[a] / norm;
  t.direction[n - 1] = 1.0 / norm;
  // slide along the axis to x_n = 0
  double s = -point[n - 1] / t.direction[n - 1];
  t.base.resize(n);
  for (int a = 0; a < n; ++a) t.base[a] = point[a] + s * t.direction[a];
  t.cross_radius = std::sqrt(R);
  t.length = length;
  return t;
}

double axis_distance(const Tube& t, std::span<const double> x, double dilation) {
  const std::size_t n = t.base.size();
  double proj = 0.0;
  for (std::size_t a = 0; a < n; ++a) proj += (x[a] - t.base[a]) * t.direction[a];
  const double L = dilation * t.length;
  proj = std::clamp(proj, -L, L);
  double d2 = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double v = x[a] - t.base[a] - proj * t.direction[a];
    d2 += v * v;
  }
  return std::sqrt(d2);
}

bool tube_contains(const Tube& t, std::span<const double> x, double dilation) {
  return axis_distance(t, x, dilation) <= dilation * t.cross_radius;
}

double axis_cube_distance(const Tube& t, std::span<const double> center, double side, double dilation) {
  const std::size_t n = t.base.size();
  const double half = side / 2, L = dilation * t.length;
  // Squared distance to the box is a sum of clipped squares of affine functions
  // of s; it is quadratic between the breakpoints where a coordinate crosses a face.
  std::vector<double> cuts{-L, L};
  for (std::size_t a = 0; a < n; ++a) {
    if (t.direction[a] == 0.0) continue;
    for (double face : {center[a] - half, center[a] + half}) {
      double s = (face - t.base[a]) / t.direction[a];
      if (s > -L && s < L) cuts.push_back(s);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double best = std::numeric_limits<double>::infinity();
  auto value = [&](double s) {
    double d2 = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      double g = std::abs(t.base[a] + s * t.direction[a] - center[a]) - half;
      if (g > 0) d2 += g * g;
    }
    return d2;
  };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double lo = cuts[k], hi = cuts[k + 1];
    double mid = 0.5 * (lo + hi);
    // active terms at the midpoint: (alpha + beta s)^2
    double ab = 0.0, bb = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      double off = t.base[a] + mid * t.direction[a] - center[a];
      if (off > half) {
        ab += (t.base[a] - center[a] - half) * t.direction[a];
        bb += t.direction[a] * t.direction[a];
      } else if (off < -half) {
        ab += (t.base[a] - center[a] + half) * t.direction[a];
        bb += t.direction[a] * t.direction[a];
      }
    }
    double s = bb > 0 ? std::clamp(-ab / bb, lo, hi) : mid;
    best = std::min({best, value(s), value(lo), value(hi)});
  }
  return std::sqrt(best);
}

bool tube_meets_cube(const Tube& t, std::span<const double> center, double side, double dilation) {
  // the cube lies within half its diagonal of its center
  double reach = dilation * t.cross_radius;
  double d = axis_distance(t, center, dilation);
  double half_diag = 0.5 * side * std::sqrt(static_cast<double>(center.size()));
  if (d > reach + half_diag) return false;
  if (d <= reach) return true;
  return axis_cube_distance(t, center, side, dilation) <= dilation * t.cross_radius;
}

void validate(const IncidenceConfig& c) {
  require(c.n >= 2 && c.n <= 4, ErrorKind::InvalidArgument, "dimension must be 2..4");
  require(c.R >= 1.0 && c.delta >= 0.0 && c.delta < 1.0, ErrorKind::InvalidArgument, "need R >= 1 and delta in [0, 1)");
  std::vector<double> origin(c.n, 0.0);
  for (const auto* family : {&c.T1, &c.T2})
    for (const auto& t : *family) {
      require(static_cast<int>(t.base.size()) == c.n && static_cast<int>(t.direction.size()) == c.n,
              ErrorKind::InvalidArgument, "tube dimension mismatch");
      require(axis_distance(t, origin) <= 10.0 * c.R + t.cross_radius, ErrorKind::InvalidArgument,
              "tube misses 10 B_R");
    }
}

namespace {

std::vector<double> uniform_in_ball(Rng& rng, int dim, double radius) {
  std::vector<double> p(dim);
  for (;;) {
    double r2 = 0.0;
    for (auto& v : p) {
      v = uniform(rng, -1.0, 1.0);
      r2 += v * v;
    }
    if (r2 <= 1.0) break;
  }
  for (auto& v : p) v *= radius;
  return p;
}

}  // namespace

IncidenceConfig random_incidence_config(int n, double R, double delta, std::uint64_t seed,
                                        const RandomConfigOptions& options) {
  IncidenceConfig c;
  c.n = n;
  c.R = R;
  c.delta = delta;
  // cap centers on the packet lattice 2 R^{-1/2} Z^{n-1}
  const double spacing = 2.0 / std::sqrt(R);
  for (int family = 0; family < 2; ++family) {
    Rng rng = make_rng(seed, family);
    auto& tubes = family == 0 ? c.T1 : c.T2;
    int count = family == 0 ? options.n1 : options.n2;
    std::vector<double> bush = uniform_in_ball(rng, n, R / 2);
    std::set<std::vector<double>> bush_caps;
    for (int k = 0; k < count; ++k) {
      auto cap = uniform_in_ball(rng, n - 1, options.cap_radius);
      cap[0] += family == 0 ? -0.5 : 0.5;
      for (auto& v : cap) v = std::round(v / spacing) * spacing;
      bool in_bush = uniform(rng, 0.0, 1.0) < options.bush_fraction;
      auto point = uniform_in_ball(rng, n, R / 2);
      // one tube per direction through the common point
      if (in_bush && bush_caps.insert(cap).second) point = bush;
      tubes.push_back(tube_through(cap, point, R, R));
    }
  }
  validate(c);
  return c;
}

IncidenceConfig slab_incidence_config(int n, double R, double delta, std::uint64_t seed,
                                      const RandomConfigOptions& options) {
  IncidenceConfig c = random_incidence_config(n, R, delta, seed, options);
  Rng rng = make_rng(seed, 2);
  auto hub = uniform_in_ball(rng, n, R / 5);
  const double spacing = 2.0 / std::sqrt(R);
  const int k = static_cast<int>(std::floor(options.cap_radius / spacing));
  std::vector<int> idx(n - 2, -k);
  while (true) {
    std::vector<double> cap{-0.5};
    double r2 = 0.0;
    for (int v : idx) {
      cap.push_back(v * spacing);
      r2 += cap.back() * cap.back();
    }
    if (r2 <= options.cap_radius * options.cap_radius) c.T1.push_back(tube_through(cap, hub, R, R));
    int a = 0;
    while (a < n - 2 && ++idx[a] > k) idx[a++] = -k;
    if (a == n - 2) break;
  }
  validate(c);
  return c;
}

double dyadic_floor(double x) {
  require(x >= 1.0, ErrorKind::InvalidArgument, "dyadic class of a value below 1");
  return std::exp2(std::floor(std::log2(x) + 1e-12));
}

namespace {

void fill_tables(const IncidenceStats& s, FamilyTables& mine, const FamilyTables& other, std::size_t tubes) {
  const std::size_t nc = s.cubes.size(), nb = s.balls.size();
  std::set<double> occupied;
  for (std::size_t q = 0; q < nc; ++q)
    if (!other.of_cube[q].empty()) occupied.insert(dyadic_floor(static_cast<double>(other.of_cube[q].size())));
  mine.classes.assign(occupied.begin(), occupied.end());
  mine.class_of_cube.assign(nc, -1);
  for (std::size_t q = 0; q < nc; ++q) {
    if (other.of_cube[q].empty()) continue;
    double mu = dyadic_floor(static_cast<double>(other.of_cube[q].size()));
    mine.class_of_cube[q] =
        static_cast<int>(std::lower_bound(mine.classes.begin(), mine.classes.end(), mu) - mine.classes.begin());
  }
  mine.rows.assign(mine.classes.size(), std::vector<TubeClassRow>(tubes));
  for (auto& per_class : mine.rows)
    for (auto& row : per_class) row.per_ball.assign(nb, 0);
  for (std::size_t q = 0; q < nc; ++q) {
    int k = mine.class_of_cube[q];
    if (k < 0) continue;
    for (auto t : mine.of_cube[q]) {
      auto& row = mine.rows[k][t];
      ++row.per_ball[s.ball_of_cube[q]];
      ++row.total;
    }
  }
  mine.related.assign(tubes, {});
  for (auto& per_class : mine.rows)
    for (std::size_t t = 0; t < tubes; ++t) {
      auto& row = per_class[t];
      if (row.total == 0) continue;
      row.best_ball = static_cast<int>(std::max_element(row.per_ball.begin(), row.per_ball.end()) - row.per_ball.begin());
      const auto& star = s.balls[row.best_ball];
      for (std::size_t b = 0; b < nb; ++b) {
        double gap = 0.0;
        for (std::size_t a = 0; a < star.size(); ++a) gap = std::max(gap, std::abs(s.balls[b][a] - star[a]));
        if (gap + s.ball_radius <= 10.0 * s.ball_radius * (1.0 + 1e-12))
          mine.related[t].push_back(static_cast<std::uint32_t>(b));
      }
    }
  for (auto& r : mine.related) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
}

}  // namespace

IncidenceStats incidence_stats(const IncidenceConfig& config) {
  validate(config);
  const int n = config.n;
  const double R = config.R;
  IncidenceStats s;
  s.side = std::sqrt(R);
  s.ball_radius = std::pow(R, 1.0 - config.delta);
  s.dilation = std::pow(R, config.delta);

  const int K = static_cast<int>(std::floor(R / s.side + 1e-9));
  std::vector<int> k(n, -K);
  for (;;) {
    double r2 = 0.0;
    std::vector<double> c(n);
    for (int a = 0; a < n; ++a) {
      c[a] = k[a] * s.side;
      r2 += c[a] * c[a];
    }
    if (r2 <= R * R * (1.0 + 1e-12)) s.cubes.push_back(std::move(c));
    int a = n - 1;
    while (a >= 0 && ++k[a] > K) k[a--] = -K;
    if (a < 0) break;
  }

  const double Rp = s.ball_radius;
  const int nb = static_cast<int>(std::ceil(R / Rp - 1e-9));
  const double start = -nb * Rp;
  std::vector<int> kb(n, 0);
  for (;;) {
    std::vector<double> c(n);
    for (int a = 0; a < n; ++a) c[a] = start + (2 * kb[a] + 1) * Rp;
    s.balls.push_back(std::move(c));
    int a = n - 1;
    while (a >= 0 && ++kb[a] >= nb) kb[a--] = 0;
    if (a < 0) break;
  }
  s.ball_of_cube.resize(s.cubes.size());
  for (std::size_t q = 0; q < s.cubes.size(); ++q) {
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a) {
      int j = std::clamp(static_cast<int>(std::floor((s.cubes[q][a] - start) / (2 * Rp))), 0, nb - 1);
      idx = idx * nb + j;
    }
    s.ball_of_cube[q] = static_cast<std::uint32_t>(idx);
  }

  const std::size_t nc = s.cubes.size();
  s.t1.of_cube.assign(nc, {});
  s.t2.of_cube.assign(nc, {});
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t q = 0; q < nc; ++q) {
    for (std::size_t t = 0; t < config.T1.size(); ++t)
      if (tube_meets_cube(config.T1[t], s.cubes[q], s.side, s.dilation))
        s.t1.of_cube[q].push_back(static_cast<std::uint32_t>(t));
    for (std::size_t t = 0; t < config.T2.size(); ++t)
      if (tube_meets_cube(config.T2[t], s.cubes[q], s.side, s.dilation))
        s.t2.of_cube[q].push_back(static_cast<std::uint32_t>(t));
  }
  fill_tables(s, s.t1, s.t2, config.T1.size());
  fill_tables(s, s.t2, s.t1, config.T2.size());
  return s;
}

std::vector<std::size_t> IncidenceStats::cubes_in_class(double mu2) const {
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < cubes.size(); ++q) {
    int k = t1.class_of_cube[q];
    if (k >= 0 && t1.classes[k] == mu2) out.push_back(q);
  }
  return out;
}

namespace {

int class_index(const FamilyTables& f, double mu) {
  auto it = std::find(f.classes.begin(), f.classes.end(), mu);
  return it == f.classes.end() ? -1 : static_cast<int>(it - f.classes.begin());
}

}  // namespace

std::vector<std::uint32_t> IncidenceStats::tube_class(double mu2, double lambda1) const {
  std::vector<std::uint32_t> out;
  int k = class_index(t1, mu2);
  if (k < 0) return out;
  for (std::size_t t = 0; t < t1.rows[k].size(); ++t) {
    double lam = t1.rows[k][t].total;
    if (lam >= lambda1 && lam < 2 * lambda1) out.push_back(static_cast<std::uint32_t>(t));
  }
  return out;
}

std::vector<double> IncidenceStats::lambda_classes(double mu2) const {
  std::set<double> out;
  int k = class_index(t1, mu2);
  if (k >= 0)
    for (const auto& row : t1.rows[k])
      if (row.total > 0) out.insert(dyadic_floor(row.total));
  return {out.begin(), out.end()};
}

bool IncidenceStats::related(std::uint32_t tube, std::uint32_t ball) const {
  const auto& r = t1.related[tube];
  return std::binary_search(r.begin(), r.end(), ball);
}

namespace {

std::vector<std::vector<double>> cap_samples(std::vector<double> center, double r, int count) {
  std::vector<std::vector<double>> out;
  const int m = static_cast<int>(center.size());
  if (m == 1) {
    for (int j = 0; j < count; ++j) out.push_back({center[0] + r * (count == 1 ? 0.0 : -1.0 + 2.0 * j / (count - 1))});
    return out;
  }
  out.push_back(center);
  for (int a = 0; a < m && static_cast<int>(out.size()) < count; ++a)
    for (double sgn : {-1.0, 1.0}) {
      if (static_cast<int>(out.size()) >= count) break;
      auto p = center;
      p[a] += sgn * r / 2;
      out.push_back(p);
    }
  return out;
}

}  // namespace

KakeyaCheck kakeya_bound_check(const IncidenceConfig& config, const IncidenceStats& stats, double mu2,
                               double lambda1, const KakeyaOptions& options) {
  const int m = config.n - 1;
  auto members = stats.tube_class(mu2, lambda1);
  if (members.empty()) throw Error(ErrorKind::EmptyClass, "T1[mu2, lambda1] is empty");
  std::vector<char> in_class(config.T1.size(), 0);
  for (auto t : members) in_class[t] = 1;

  auto c1 = options.cap1_center, c2 = options.cap2_center;
  if (c1.empty()) {
    c1.assign(m, 0.0);
    c1[0] = -0.5;
  }
  if (c2.empty()) {
    c2.assign(m, 0.0);
    c2[0] = 0.5;
  }
  auto s1 = cap_samples(c1, options.cap_radius, options.samples_per_cap);
  auto s2 = cap_samples(c2, options.cap_radius, options.samples_per_cap);
  const double slab = 1.0 / std::sqrt(config.R);

  KakeyaCheck out;
  out.mu2 = mu2;
  out.lambda1 = lambda1;
  out.class_size = members.size();
  out.T2 = config.T2.size();
  out.rhs = options.C * std::pow(config.R, options.Cdelta * config.delta) * static_cast<double>(config.T2.size()) /
            (mu2 * lambda1);
  for (auto q0 : stats.cubes_in_class(mu2)) {
    std::vector<std::uint32_t> candidates;
    for (auto t : stats.t1.of_cube[q0])
      if (in_class[t] && !(options.exclude_related && stats.related(t, stats.ball_of_cube[q0]))) candidates.push_back(t);
    if (static_cast<double>(candidates.size()) <= out.lhs) continue;
    for (const auto& xa : s1)
      for (const auto& xb : s2) {
        std::vector<double> normal(m);
        double nn = 0.0;
        for (int a = 0; a < m; ++a) {
          normal[a] = xa[a] - xb[a];
          nn += normal[a] * normal[a];
        }
        nn = std::sqrt(nn);
        if (nn == 0.0) continue;
        double count = 0.0;
        for (auto t : candidates) {
          double d = 0.0;
          for (int a = 0; a < m; ++a) d += (config.T1[t].cap_center[a] - xa[a]) * normal[a] / nn;
          if (std::abs(d) < slab) count += 1.0;
        }
        if (count > out.lhs) {
          out.lhs = count;
          out.q0 = q0;
        }
      }
  }
  return out;
}

std::vector<KakeyaCheck> kakeya_sweep(const IncidenceConfig& config, const IncidenceStats& stats,
                                      const KakeyaOptions& options) {
  std::vector<KakeyaCheck> out;
  for (double mu2 : stats.t1.classes)
    for (double lambda1 : stats.lambda_classes(mu2)) out.push_back(kakeya_bound_check(config, stats, mu2, lambda1, options));
  return out;
}

}  // namespace rlab

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rlab {

// Capsule around the axis segment {base + s * direction : |s| <= length}.
// direction is the unit vector along (-c, 1) for the cap center c.
struct Tube {
  std::vector<double> direction;
  std::vector<double> base;  // axis point at x_n = 0 (or at the packet's height)
  std::vector<double> cap_center;
  double cross_radius = 0.0;
  double length = 0.0;
};

// Tube through `point` with direction (-cap_center, 1), cross radius R^{1/2}.
Tube tube_through(std::span<const double> cap_center, std::span<const double> point, double R, double length);

// Distance from x to the axis segment of the A-dilated tube.
double axis_distance(const Tube& t, std::span<const double> x, double dilation = 1.0);
bool tube_contains(const Tube& t, std::span<const double> x, double dilation = 1.0);
// Exact distance between the dilated axis segment and the closed cube of the given
// side around `center`; the dilated tube meets the cube iff it is <= dilation * r.
double axis_cube_distance(const Tube& t, std::span<const double> center, double side, double dilation = 1.0);
bool tube_meets_cube(const Tube& t, std::span<const double> center, double side, double dilation = 1.0);

struct IncidenceConfig {
  int n = 2;
  double R = 64.0;
  double delta = 0.1;
  std::vector<Tube> T1, T2;
};

// Errors: InvalidArgument if a tube misses 10 B_R or has the wrong dimension.
void validate(const IncidenceConfig& config);

// Scale where balls B_{R'} outnumber the 10x relation window (R^delta > 10)
// while the dilated tubes still cover only part of B_R.
inline constexpr double kKakeyaR = 1024.0;
inline constexpr double kKakeyaDelta = 0.35;

struct RandomConfigOptions {
  int n1 = 20;
  int n2 = 20;
  double cap_radius = 0.25;
  double bush_fraction = 0.3;  // share of tubes through one common point per family
};

// T1 caps around -e1/2, T2 caps around +e1/2 (the separated caps of the bilinear
// experiments), centers snapped to the packet lattice 2 R^{-1/2} Z^{n-1}; every tube
// passes through B_{R/2}. Bush tubes share one point and have distinct caps.
IncidenceConfig random_incidence_config(int n, double R, double delta, std::uint64_t seed,
                                        const RandomConfigOptions& options = {});

// random_incidence_config plus a T1 bush: one tube per lattice cap on the slab
// xi_1 = -1/2 (within cap_radius of -e1/2) through a common point of B_{R/5}.
IncidenceConfig slab_incidence_config(int n, double R, double delta, std::uint64_t seed,
                                      const RandomConfigOptions& options = {});

// lambda(T, mu, B) for one tube and one multiplicity class.
struct TubeClassRow {
  std::vector<std::uint32_t> per_ball;
  std::uint32_t total = 0;
  int best_ball = -1;  // B*, lowest index on ties; -1 when total = 0
};

struct FamilyTables {
  std::vector<std::vector<std::uint32_t>> of_cube;    // tubes of this family meeting each dilated cube test
  std::vector<double> classes;                         // occupied dyadic multiplicity classes of the other family
  std::vector<int> class_of_cube;                      // index into classes, -1 for multiplicity 0
  std::vector<std::vector<TubeClassRow>> rows;         // [class][tube]
  std::vector<std::vector<std::uint32_t>> related;     // balls related to each tube, sorted
};

// Cubes q of side R^{1/2} centered on R^{1/2} Z^n inside B_R, balls B_{R'} as cubes of
// side 2R' (R' = R^{1-delta}) tiling [-R, R]^n, all incidences through R^delta T.
struct IncidenceStats {
  double side = 0.0;
  double ball_radius = 0.0;
  double dilation = 1.0;
  std::vector<std::vector<double>> cubes;
  std::vector<std::vector<double>> balls;
  std::vector<std::uint32_t> ball_of_cube;
  // t1: classes by |T2(q)| and lambda(T1, mu2, B); t2: the symmetric tables.
  FamilyTables t1, t2;

  const std::vector<std::uint32_t>& T2_of(std::size_t cube) const { return t2.of_cube[cube]; }
  std::vector<std::size_t> cubes_in_class(double mu2) const;
  // T1[mu2, lambda1]: tubes with lambda1 <= lambda(T1, mu2) < 2 lambda1.
  std::vector<std::uint32_t> tube_class(double mu2, double lambda1) const;
  std::vector<double> lambda_classes(double mu2) const;
  bool related(std::uint32_t tube, std::uint32_t ball) const;
};

IncidenceStats incidence_stats(const IncidenceConfig& config);

// Largest power of two not above x (x >= 1).
double dyadic_floor(double x);

struct KakeyaOptions {
  double C = 1.0;
  double Cdelta = 1.0;
  std::vector<double> cap1_center;  // projections of the two caps, default -e1/2 and +e1/2
  std::vector<double> cap2_center;
  double cap_radius = 0.25;
  int samples_per_cap = 5;
  // Drop tubes related to the ball of q0 (the literal T1'). Off counts every class
  // tube through q0, a superset, so a bound for it implies the literal one.
  bool exclude_related = true;
};

struct KakeyaCheck {
  double mu2 = 0.0;
  double lambda1 = 0.0;
  std::size_t class_size = 0;
  std::size_t T2 = 0;
  double lhs = 0.0;  // sampled max of |T1'(q0)(xi', xi' - xi'')|
  double rhs = 0.0;  // C R^{Cdelta delta} |T2| / (mu2 lambda1)
  std::size_t q0 = 0;
};

// Errors: EmptyClass if T1[mu2, lambda1] is empty.
KakeyaCheck kakeya_bound_check(const IncidenceConfig& config, const IncidenceStats& stats, double mu2,
                               double lambda1, const KakeyaOptions& options);
// Every occupied (mu2, lambda1) class.
std::vector<KakeyaCheck> kakeya_sweep(const IncidenceConfig& config, const IncidenceStats& stats,
                                      const KakeyaOptions& options);

}  // namespace rlab

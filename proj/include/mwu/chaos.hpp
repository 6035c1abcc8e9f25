#pragma once

// Chaos certification and fine structure of the bimodal map: period-3
// witnesses, symbolic entropy, the period-doubling cascade, the superstable
// skeleton, Schwarzian derivatives and coexisting attractors.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mwu/dynamics.hpp"
#include "mwu/orbit.hpp"

namespace mwu {

/// Li-Yorke certificate: satisfied iff x3 < x0 < x1 with x1 = f(x0), x3 = f^3(x0).
struct Period3Witness {
  double x0 = 0.0;
  double x1 = 0.0;
  double x3 = 0.0;
  bool satisfied = false;
};

/// Evaluates the certificate at a single point of a scalar map.
Period3Witness period3_test(const MapSpec& map, double x0);

/// Scans x0 = i/grid_size, i = 1..grid_size-1. Returns the first satisfied
/// witness; an empty result is inconclusive.
std::optional<Period3Witness> find_period3_witness(const MapSpec& map, std::size_t grid_size);

struct WitnessHit {
  double a = 0.0;
  Period3Witness witness;
};

/// Smallest a on the grid a_min + k*(a_max - a_min)/steps carrying a witness.
std::optional<WitnessHit> scan_period3(const std::function<MapSpec(double)>& family, double a_min,
                                       double a_max, std::size_t steps, std::size_t grid_size);

struct EntropyOptions {
  std::size_t word_length = 20;
  std::size_t init_grid = 200;
  std::size_t transient = 2000;
  std::size_t orbit_length = 2000;
};

struct EntropyEstimate {
  double rate = 0.0;
  /// counts[n-1] = distinct words of length n.
  std::vector<std::size_t> counts;
};

/// Growth rate of distinct {A,B,C} words. Slope of log(count) against n
/// over n in [word_length/2, word_length], pooled over init_grid starts
/// x0 = (i + 1/2)/init_grid.
EntropyEstimate estimate_entropy(const LinearTwoParams& p, const EntropyOptions& opts = {});

struct FeigenbaumEstimate {
  double a = 0.0;
  bool left_critical = true;
  int direction = 1;
  /// parameters[n]: b at which the critical point lies on a superstable 2^n-cycle.
  std::vector<double> parameters;
  /// distances[n-1] = d_n = f^{2^{n-1}}(x_c) - x_c at parameters[n].
  std::vector<double> distances;
  /// delta[n-1] = (b_{n+1} - b_n)/(b_{n+2} - b_{n+1}).
  std::vector<double> delta;
  /// alpha[n-1] = d_n/d_{n+1}.
  std::vector<double> alpha;
  /// residuals[n] = |f^{2^n}(x_c) - x_c| at parameters[n].
  std::vector<double> residuals;
  std::size_t n_max = 0;

  [[nodiscard]] double delta_at(std::size_t n) const { return delta.at(n - 1); }
  [[nodiscard]] double alpha_at(std::size_t n) const { return alpha.at(n - 1); }
};

/// Period-doubling cascade along b at fixed a, started from the
/// superstable fixed point b_0 = x_c and walked in `direction` (+1/-1).
/// Locates superstable parameters up to level n_max + 2 so delta and alpha
/// are available through n_max. Throws PreconditionError naming the last
/// resolved level when a level cannot be bracketed.
FeigenbaumEstimate feigenbaum_cascade(double a, int direction, std::size_t n_max,
                                      bool left_critical = true);

/// f^{period}(x_c; b) - x_c for the chosen critical point.
double superstable_residual(double a, double b, std::size_t period, bool left_critical = true);

/// Bisection on superstable_residual over a sign-changing bracket [lo, hi].
double refine_superstable(double a, double lo, double hi, std::size_t period,
                          bool left_critical = true, double tol = 1e-16);

/// S(a,b) = 1/(ab) + 1/(b + ab e^{1-ab}).
double superstable_level(double a, double b);

/// b = (2 ln(a-1) + 1)/a, where both critical points share one cycle.
double both_critical_curve(double a);

/// a in [a_lo, a_hi] with S(a,b) = level, by bisection; S must change sign
/// relative to level across the bracket.
double solve_superstable_level(double b, double level, double a_lo, double a_hi);

/// Sf = f'''/f' - (3/2)(f''/f')^2 from closed-form derivatives. Throws
/// PreconditionError at a critical point, where 1 - a x(1-x) vanishes.
double schwarzian(const LinearTwoParams& p, double x);

struct Coexistence {
  PeriodResult left;
  PeriodResult right;
  bool coexist = false;
};

/// Attractors reached from x_l and x_r. They coexist when the periods
/// differ or the periodic point sets are disjoint at `match_tol`.
Coexistence coexisting_attractors(const LinearTwoParams& p, const PeriodOptions& opts = {},
                                  double match_tol = 1e-8);

/// All a on the grid a_min + k*(a_max - a_min)/steps with coexistence at b.
std::vector<double> scan_coexistence(double b, double a_min, double a_max, std::size_t steps,
                                     const PeriodOptions& opts = {});

}  // namespace mwu

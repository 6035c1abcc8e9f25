#pragma once

// Economic observables of MWU orbits: time averages, fluctuation, regret,
// normalized social cost, and the analytic rates at the first
// period-doubling bifurcation.

#include <cstddef>
#include <vector>

#include "mwu/dynamics.hpp"
#include "mwu/orbit.hpp"

namespace mwu {

struct MetricsReport {
  double cesaro_mean = 0.0;
  double variance = 0.0;
  double regret_avg = 0.0;
  /// NaN when a <= 1/(b(1-b)) and no absorbing interval is established.
  double regret_bound = 0.0;
  double norm_social_cost = 0.0;
  std::size_t T = 0;
  double demand_N = 0.0;
};

/// Coefficients of the cubic normal form of f_{a,b} around b.
struct NormalFormCoeffs {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
};

/// One-sided derivatives with respect to a at a* = 2/(b(1-b)).
struct BifurcationSlopes {
  double dvar_da = 0.0;
  double dsc_da = 0.0;
  double dregret_da = 0.0;
};

double cesaro_average(const Orbit& orbit);

/// (1/T) sum (x_n - b)^2.
double variance(const Orbit& orbit, double b);

/// Finite-horizon time-average regret: realized average cost minus the
/// better of the two fixed actions, costs alpha*N*x and beta*N*(1-x).
double time_avg_regret(const Orbit& orbit, const GameEconomics& econ);

/// N (y_max - b)(b - y_min); PreconditionError unless a > 1/(b(1-b)).
double regret_upper_bound(const LinearTwoParams& p, double N);

/// (1/T) sum (x^2 - 2bx + b) / (b(1-b)).
double normalized_social_cost(const Orbit& orbit, const LinearTwoParams& p);

/// Demand 2/(b(1-b)) above which the equilibrium repels.
double carrying_capacity(double b);

NormalFormCoeffs normal_form_coeffs(const LinearTwoParams& p);

BifurcationSlopes bifurcation_analytics(double b);

/// (1/T) sum (c1(x_n) - c2(x_n)) with c1 = alpha N^p x^p, c2 = beta N^p (1-x)^p.
double cost_gap_average(const Orbit& orbit, const PolynomialParams& p, const GameEconomics& econ);

/// Per-path (1/T) sum x_i(n).
std::vector<double> simplex_cost_averages(const Orbit& orbit, const SimplexParams& p);

/// (1/T) sum (eta1 x_n + eta2 y_n).
double hetero_mixture_average(const Orbit& orbit, const HeteroParams& p);

/// Full report for a linear two-path orbit generated by econ.
MetricsReport metrics_report(const Orbit& orbit, const GameEconomics& econ);

/// Economics with alpha + beta = 1, epsilon = 1 - 1/e and N = a, the
/// convention under which a and N coincide.
GameEconomics unit_economics(const LinearTwoParams& p);

struct SlopeFitOptions {
  double width = 0.2;
  std::size_t points = 20;
  std::size_t T = 1'000'000;
  std::size_t transient = 100'000;
};

struct SlopeFit {
  double a_star = 0.0;
  double sc_slope = 0.0;
  double regret_slope = 0.0;
  std::vector<double> a_values;
  std::vector<double> sc_values;
  std::vector<double> regret_values;
};

/// Least-squares rates of normalized social cost and regret (N = a) on
/// a in (a*, a* + width], using increments over their values at a*
/// (1 and 0), which the fit passes through.
SlopeFit fit_bifurcation_slopes(double b, const SlopeFitOptions& opts = {});

/// Ordinary least-squares slope of y on x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mwu

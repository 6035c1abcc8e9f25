#include "mwu/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mwu/errors.hpp"

namespace mwu {

namespace {

// Neumaier compensated sum; orbit averages run over ~1e6 terms.
class Accumulator {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double total() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_scalar(const Orbit& orbit) {
  if (orbit.dim != 1) throw DomainError("metric needs a scalar orbit");
  if (orbit.size() == 0) throw DomainError("metric needs a non-empty orbit");
}

template <class F>
double orbit_mean(const Orbit& orbit, F&& term) {
  Accumulator acc;
  for (double x : orbit.data) acc.add(term(x));
  return acc.total() / static_cast<double>(orbit.size());
}

}  // namespace

double cesaro_average(const Orbit& orbit) {
  require_scalar(orbit);
  return orbit_mean(orbit, [](double x) { return x; });
}

double variance(const Orbit& orbit, double b) {
  require_scalar(orbit);
  return orbit_mean(orbit, [b](double x) { return (x - b) * (x - b); });
}

double time_avg_regret(const Orbit& orbit, const GameEconomics& econ) {
  require_scalar(orbit);
  econ.validate();
  const double aN = econ.alpha * econ.demand_N;
  const double bN = econ.beta * econ.demand_N;
  const double realized =
      orbit_mean(orbit, [&](double x) { return aN * x * x + bN * (1.0 - x) * (1.0 - x); });
  const double mean = cesaro_average(orbit);
  return realized - std::min(aN * mean, bN * (1.0 - mean));
}

double regret_upper_bound(const LinearTwoParams& p, double N) {
  p.validate();
  if (!(p.a > 1.0 / (p.b * (1.0 - p.b)))) {
    throw PreconditionError("no absorbing interval established: need a > 1/(b(1-b))");
  }
  const auto cs = critical_structure(p);
  return N * (cs.y_max - p.b) * (p.b - cs.y_min);
}

double normalized_social_cost(const Orbit& orbit, const LinearTwoParams& p) {
  require_scalar(orbit);
  const double b = p.b;
  return orbit_mean(orbit, [b](double x) { return x * x - 2.0 * b * x + b; }) / (b * (1.0 - b));
}

double carrying_capacity(double b) {
  if (!(b > 0.0 && b < 1.0)) throw DomainError("equilibrium split b must lie in (0,1)");
  return 2.0 / (b * (1.0 - b));
}

NormalFormCoeffs normal_form_coeffs(const LinearTwoParams& p) {
  p.validate();
  const double a = p.a;
  const double b = p.b;
  const double abb = a * b * (b - 1.0);
  return {2.0 + abb, a * (b - 0.5) * (1.0 + abb),
          a * (1.0 + a * (1.0 / 6.0 + b * (b - 1.0)) * (3.0 + abb))};
}

BifurcationSlopes bifurcation_analytics(double b) {
  if (!(b > 0.0 && b < 1.0)) throw DomainError("equilibrium split b must lie in (0,1)");
  const double q = b * (1.0 - b);
  return {3.0 * q * q * q / (2.0 - 6.0 * q), 3.0 * q * q / (2.0 - 6.0 * q),
          3.0 * q * q / (1.0 - 3.0 * q)};
}

double cost_gap_average(const Orbit& orbit, const PolynomialParams& p, const GameEconomics& econ) {
  require_scalar(orbit);
  econ.validate();
  const double scale = std::pow(econ.demand_N, p.degree);
  return orbit_mean(orbit, [&](double x) {
    return scale * (econ.alpha * std::pow(x, p.degree) - econ.beta * std::pow(1.0 - x, p.degree));
  });
}

std::vector<double> simplex_cost_averages(const Orbit& orbit, const SimplexParams& p) {
  if (orbit.dim != p.size()) throw DomainError("orbit dimension does not match simplex params");
  if (orbit.size() == 0) throw DomainError("metric needs a non-empty orbit");
  std::vector<Accumulator> acc(orbit.dim);
  for (std::size_t n = 0; n < orbit.size(); ++n) {
    const auto pt = orbit.point(n);
    for (std::size_t i = 0; i < orbit.dim; ++i) acc[i].add(pt[i]);
  }
  std::vector<double> out(orbit.dim);
  for (std::size_t i = 0; i < orbit.dim; ++i) {
    out[i] = acc[i].total() / static_cast<double>(orbit.size());
  }
  return out;
}

double hetero_mixture_average(const Orbit& orbit, const HeteroParams& p) {
  if (orbit.dim != 2) throw DomainError("mixture average needs a two-population orbit");
  if (orbit.size() == 0) throw DomainError("metric needs a non-empty orbit");
  Accumulator acc;
  for (std::size_t n = 0; n < orbit.size(); ++n) {
    const auto pt = orbit.point(n);
    acc.add(p.eta1 * pt[0] + p.eta2 * pt[1]);
  }
  return acc.total() / static_cast<double>(orbit.size());
}

MetricsReport metrics_report(const Orbit& orbit, const GameEconomics& econ) {
  const auto p = normalize_economics(econ);
  MetricsReport r;
  r.cesaro_mean = cesaro_average(orbit);
  r.variance = variance(orbit, p.b);
  r.regret_avg = time_avg_regret(orbit, econ);
  r.regret_bound = p.a > 1.0 / (p.b * (1.0 - p.b))
                       ? (econ.alpha + econ.beta) * regret_upper_bound(p, econ.demand_N)
                       : std::numeric_limits<double>::quiet_NaN();
  r.norm_social_cost = normalized_social_cost(orbit, p);
  r.T = orbit.size();
  r.demand_N = econ.demand_N;
  return r;
}

GameEconomics unit_economics(const LinearTwoParams& p) {
  p.validate();
  return {1.0 - p.b, p.b, p.a, -std::expm1(-1.0)};
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs >= 2 paired points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

SlopeFit fit_bifurcation_slopes(double b, const SlopeFitOptions& opts) {
  if (opts.points < 1 || !(opts.width > 0.0)) throw DomainError("invalid slope fit window");
  SlopeFit fit;
  fit.a_star = carrying_capacity(b);
  double sxx = 0.0;
  double sxs = 0.0;
  double sxr = 0.0;
  for (std::size_t k = 1; k <= opts.points; ++k) {
    const double da = opts.width * static_cast<double>(k) / static_cast<double>(opts.points);
    const LinearTwoParams p{fit.a_star + da, b};
    const auto cs = critical_structure(p);
    const auto orbit = iterate(MapSpec{p}, cs.x_l, opts.transient, opts.T);
    const double sc = normalized_social_cost(orbit, p);
    const double regret = time_avg_regret(orbit, unit_economics(p));
    fit.a_values.push_back(p.a);
    fit.sc_values.push_back(sc);
    fit.regret_values.push_back(regret);
    sxx += da * da;
    sxs += da * (sc - 1.0);
    sxr += da * regret;
  }
  fit.sc_slope = sxs / sxx;
  fit.regret_slope = sxr / sxx;
  return fit;
}

}  // namespace mwu

#include "mwu/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <tuple>

#include "mwu/errors.hpp"

namespace mwu {

namespace {

double max_abs_diff(std::span<const double> u, std::span<const double> v) {
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - v[i]));
  return d;
}

void check_start(const MapSpec& map, std::span<const double> x0) {
  map.validate();
  if (x0.size() != map.dimension()) throw DomainError("initial state dimension does not match map");
  if (map.family() == MapFamily::simplex) {
    require_interior_simplex(x0, map.dimension());
    return;
  }
  for (double v : x0) {
    if (!(v > 0.0 && v < 1.0)) throw DomainError("initial state must be interior to (0,1)");
  }
}

// Heterogeneous orbits run on logits so the first integral is not
// degraded by the x <-> logit round trip near the boundary.
Orbit iterate_hetero(const MapSpec& map, std::span<const double> x0, std::size_t transient,
                     std::size_t samples) {
  const auto& p = std::get<HeteroParams>(map.params);
  Orbit orbit{map, {x0.begin(), x0.end()}, transient, 2, {}, false};
  orbit.data.reserve(2 * samples);
  double z = logit(x0[0]);
  double w = logit(x0[1]);
  for (std::size_t n = 0; n < transient; ++n) std::tie(z, w) = step_hetero_logit(z, w, p);
  for (std::size_t n = 0; n < samples; ++n) {
    orbit.data.push_back(clamp_interior(logistic(z), &orbit.saturated));
    orbit.data.push_back(clamp_interior(logistic(w), &orbit.saturated));
    std::tie(z, w) = step_hetero_logit(z, w, p);
  }
  return orbit;
}

bool is_superstable(const MapSpec& map, std::span<const double> points, double tol) {
  if (map.family() != MapFamily::linear2) return false;
  const auto& p = std::get<LinearTwoParams>(map.params);
  if (p.a <= 4.0) return false;
  const auto cs = critical_structure(p);
  return std::any_of(points.begin(), points.end(), [&](double x) {
    return std::abs(x - cs.x_l) < tol || std::abs(x - cs.x_r) < tol;
  });
}

}  // namespace

Orbit iterate(const MapSpec& map, std::span<const double> x0, std::size_t transient,
              std::size_t samples) {
  check_start(map, x0);
  if (map.family() == MapFamily::hetero2) return iterate_hetero(map, x0, transient, samples);

  Orbit orbit{map, {x0.begin(), x0.end()}, transient, map.dimension(), {}, false};
  std::vector<double> state(x0.begin(), x0.end());
  for (std::size_t n = 0; n < transient; ++n) step_state(map, state, &orbit.saturated);
  orbit.data.reserve(samples * orbit.dim);
  for (std::size_t n = 0; n < samples; ++n) {
    orbit.data.insert(orbit.data.end(), state.begin(), state.end());
    step_state(map, state, &orbit.saturated);
  }
  return orbit;
}

Orbit iterate(const MapSpec& map, double x0, std::size_t transient, std::size_t samples) {
  return iterate(map, std::span<const double>(&x0, 1), transient, samples);
}

PeriodResult detect_period(const MapSpec& map, std::span<const double> x0,
                           const PeriodOptions& opts) {
  check_start(map, x0);
  if (opts.max_period == 0) throw DomainError("max_period must be at least 1");
  const std::size_t dim = map.dimension();
  std::vector<double> state(x0.begin(), x0.end());

  PeriodResult result;
  result.dim = dim;

  if (opts.adaptive) {
    // Once the floating-point orbit repeats exactly with lag p it is
    // periodic for good, so the state after the full transient is known:
    // skip ahead to the same phase. Tolerance-based exits are not used
    // because the closure test near 0 or 1 depends on the cycle phase.
    std::deque<std::vector<double>> recent;  // recent[p-1] = state p steps back
    std::size_t n = 0;
    while (n < opts.transient) {
      step_state(map, state);
      ++n;
      std::size_t lag = 0;
      for (std::size_t p = 1; p <= recent.size() && lag == 0; ++p) {
        if (std::equal(state.begin(), state.end(), recent[p - 1].begin())) lag = p;
      }
      if (lag != 0) {
        for (std::size_t k = 0; k < (opts.transient - n) % lag; ++k) step_state(map, state);
        break;
      }
      recent.push_front(state);
      if (recent.size() > opts.max_period) recent.pop_back();
    }
    result.transient_used = n;
  } else {
    for (std::size_t n = 0; n < opts.transient; ++n) step_state(map, state);
    result.transient_used = opts.transient;
  }

  const std::vector<double> anchor = state;
  std::vector<double> points = anchor;
  for (std::size_t n = 1; n <= opts.max_period; ++n) {
    step_state(map, state);
    const double r = max_abs_diff(state, anchor);
    if (r < opts.tol) {
      result.period = n;
      result.residual = r;
      result.orbit_points = std::move(points);
      result.superstable = is_superstable(map, result.orbit_points, opts.superstable_tol);
      return result;
    }
    result.residual = std::min(result.residual, r);
    if (n < opts.max_period) points.insert(points.end(), state.begin(), state.end());
  }
  result.orbit_points = std::move(points);
  return result;
}

PeriodResult detect_period(const MapSpec& map, double x0, const PeriodOptions& opts) {
  return detect_period(map, std::span<const double>(&x0, 1), opts);
}

double lyapunov(const MapSpec& map, double x0, std::size_t T, std::size_t transient) {
  if (!map.is_scalar()) throw DomainError("Lyapunov exponent is defined for scalar maps only");
  if (T == 0) throw DomainError("T must be at least 1");
  check_start(map, std::span<const double>(&x0, 1));
  double x = x0;
  for (std::size_t n = 0; n < transient; ++n) x = step_scalar(map, x);
  double sum = 0.0;
  for (std::size_t n = 0; n < T; ++n) {
    const double d = derivative_scalar(map, x);
    if (d == 0.0) return -std::numeric_limits<double>::infinity();
    sum += std::log(std::abs(d));
    x = step_scalar(map, x);
  }
  return sum / static_cast<double>(T);
}

double cycle_lyapunov(const MapSpec& map, std::span<const double> points) {
  if (points.empty()) throw DomainError("empty cycle");
  double sum = 0.0;
  for (double x : points) {
    const double d = derivative_scalar(map, x);
    if (d == 0.0) return -std::numeric_limits<double>::infinity();
    sum += std::log(std::abs(d));
  }
  return sum / static_cast<double>(points.size());
}

char symbol_of(double x, const CriticalStructure& cs) {
  if (x < cs.x_l) return 'B';
  if (x > cs.x_r) return 'C';
  return 'A';
}

std::string symbolic_code(const Orbit& orbit, const CriticalStructure& cs) {
  if (orbit.dim != 1) throw DomainError("symbolic coding needs a scalar orbit");
  std::string word;
  word.reserve(orbit.size());
  for (double x : orbit.data) word.push_back(symbol_of(x, cs));
  return word;
}

std::vector<CobwebSegment> cobweb_trace(const MapSpec& map, double x0, std::size_t steps) {
  if (!map.is_scalar()) throw DomainError("cobweb traces need a scalar map");
  check_start(map, std::span<const double>(&x0, 1));
  const bool has_potential = map.family() == MapFamily::linear2;
  auto phi = [&](double x) {
    return has_potential ? potential(x, std::get<LinearTwoParams>(map.params))
                         : std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<CobwebSegment> trace;
  trace.reserve(steps);
  double x = x0;
  for (std::size_t n = 0; n < steps; ++n) {
    const double y = step_scalar(map, x);
    trace.push_back({x, y, phi(x), phi(y)});
    x = y;
  }
  return trace;
}

InvariantDrift hetero_invariant_drift(const HeteroParams& p, double x0, double y0,
                                      std::size_t steps) {
  p.validate();
  double z = logit(x0);
  double w = logit(y0);
  InvariantDrift drift;
  drift.initial = p.a1 * w - p.a2 * z;
  double prev = drift.initial;
  for (std::size_t n = 0; n < steps; ++n) {
    std::tie(z, w) = step_hetero_logit(z, w, p);
    const double cur = p.a1 * w - p.a2 * z;
    drift.max_step = std::max(drift.max_step, std::abs(cur - prev));
    drift.cumulative = std::max(drift.cumulative, std::abs(cur - drift.initial));
    prev = cur;
  }
  return drift;
}

}  // namespace mwu

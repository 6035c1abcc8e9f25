#include "mwu/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "mwu/errors.hpp"
#include "mwu/metrics.hpp"

namespace mwu {

Period3Witness period3_test(const MapSpec& map, double x0) {
  if (!map.is_scalar()) throw DomainError("period-3 witness needs a scalar map");
  Period3Witness w;
  w.x0 = x0;
  w.x1 = step_scalar(map, x0);
  w.x3 = step_scalar(map, step_scalar(map, w.x1));
  w.satisfied = w.x3 < w.x0 && w.x0 < w.x1;
  return w;
}

std::optional<Period3Witness> find_period3_witness(const MapSpec& map, std::size_t grid_size) {
  map.validate();
  if (grid_size < 2) throw DomainError("witness grid needs at least 2 cells");
  for (std::size_t i = 1; i < grid_size; ++i) {
    const double x0 = static_cast<double>(i) / static_cast<double>(grid_size);
    const auto w = period3_test(map, x0);
    if (w.satisfied) return w;
  }
  return std::nullopt;
}

std::optional<WitnessHit> scan_period3(const std::function<MapSpec(double)>& family, double a_min,
                                       double a_max, std::size_t steps, std::size_t grid_size) {
  if (steps == 0 || !(a_max >= a_min)) throw DomainError("invalid a scan range");
  for (std::size_t k = 0; k <= steps; ++k) {
    const double a = a_min + (a_max - a_min) * static_cast<double>(k) / static_cast<double>(steps);
    if (auto w = find_period3_witness(family(a), grid_size)) return WitnessHit{a, *w};
  }
  return std::nullopt;
}

EntropyEstimate estimate_entropy(const LinearTwoParams& p, const EntropyOptions& opts) {
  const auto cs = critical_structure(p);
  const std::size_t L = opts.word_length;
  if (L < 2 || L > 40) throw DomainError("word_length must lie in [2, 40]");
  if (opts.init_grid == 0 || opts.orbit_length < L) {
    throw DomainError("entropy estimate needs init_grid >= 1 and orbit_length >= word_length");
  }

  // words are base-3 integers; 3^40 < 2^64
  std::vector<std::unordered_set<std::uint64_t>> seen(L);
  const MapSpec map{p};
  std::vector<std::uint8_t> sym(opts.orbit_length);
  for (std::size_t i = 0; i < opts.init_grid; ++i) {
    const double x0 = (static_cast<double>(i) + 0.5) / static_cast<double>(opts.init_grid);
    const auto orbit = iterate(map, x0, opts.transient, opts.orbit_length);
    for (std::size_t k = 0; k < orbit.size(); ++k) {
      sym[k] = static_cast<std::uint8_t>(symbol_of(orbit.scalar(k), cs) - 'A');
    }
    for (std::size_t n = 1; n <= L; ++n) {
      std::uint64_t mod = 1;
      for (std::size_t j = 0; j < n; ++j) mod *= 3;
      std::uint64_t code = 0;
      for (std::size_t k = 0; k < sym.size(); ++k) {
        code = (code * 3 + sym[k]) % mod;
        if (k + 1 >= n) seen[n - 1].insert(code);
      }
    }
  }

  EntropyEstimate est;
  std::vector<double> ns;
  std::vector<double> logs;
  for (std::size_t n = 1; n <= L; ++n) {
    est.counts.push_back(seen[n - 1].size());
    if (2 * n >= L) {
      ns.push_back(static_cast<double>(n));
      logs.push_back(std::log(static_cast<double>(seen[n - 1].size())));
    }
  }
  est.rate = least_squares_slope(ns, logs);
  return est;
}

namespace {

double critical_point(double a, bool left) {
  if (!(a > 4.0)) throw PreconditionError("a <= 4: no critical points");
  const double xl = 0.5 * (1.0 - std::sqrt(1.0 - 4.0 / a));
  return left ? xl : 1.0 - xl;
}

double orbit_of_critical(double a, double b, std::size_t steps, double xc) {
  const LinearTwoParams p{a, b};
  double x = xc;
  for (std::size_t n = 0; n < steps; ++n) x = step_linear2(x, p);
  return x;
}

}  // namespace

double superstable_residual(double a, double b, std::size_t period, bool left_critical) {
  const double xc = critical_point(a, left_critical);
  return orbit_of_critical(a, b, period, xc) - xc;
}

double refine_superstable(double a, double lo, double hi, std::size_t period, bool left_critical,
                          double tol) {
  if (lo > hi) std::swap(lo, hi);
  double glo = superstable_residual(a, lo, period, left_critical);
  const double ghi = superstable_residual(a, hi, period, left_critical);
  if ((glo < 0.0) == (ghi < 0.0)) throw PreconditionError("superstable bracket has no sign change");
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = superstable_residual(a, mid, period, left_critical);
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

FeigenbaumEstimate feigenbaum_cascade(double a, int direction, std::size_t n_max,
                                      bool left_critical) {
  if (direction != 1 && direction != -1) throw DomainError("direction must be +1 or -1");
  if (n_max < 1 || n_max > 20) throw DomainError("n_max must lie in [1, 20]");
  const double xc = critical_point(a, left_critical);
  const double dir = direction;

  FeigenbaumEstimate est;
  est.a = a;
  est.left_critical = left_critical;
  est.direction = direction;
  est.n_max = n_max;
  est.parameters.push_back(xc);  // superstable fixed point: f(x_c) = x_c iff b = x_c
  est.residuals.push_back(0.0);

  // Each level: walk away from the previous root in steps of 2% of the
  // expected gap (a quarter of the last one), stopping at the first sign
  // change that is not a root of the half period.
  constexpr std::size_t kMaxSteps = 20000;
  double gap = 0.05;
  for (std::size_t n = 1; n <= n_max + 2; ++n) {
    const std::size_t period = std::size_t{1} << n;
    double b = est.parameters.back() + dir * 0.3 * gap;
    double gb = superstable_residual(a, b, period, left_critical);
    bool found = false;
    for (std::size_t s = 0; s < kMaxSteps && !found; ++s) {
      const double nb = b + dir * 0.02 * gap;
      if (!(nb > 0.0 && nb < 1.0)) break;
      const double gn = superstable_residual(a, nb, period, left_critical);
      if ((gn < 0.0) != (gb < 0.0)) {
        const double r = refine_superstable(a, b, nb, period, left_critical);
        if (std::abs(superstable_residual(a, r, period / 2, left_critical)) > 1e-6) {
          gap = std::abs(r - est.parameters.back()) / 4.0;
          est.parameters.push_back(r);
          est.residuals.push_back(std::abs(superstable_residual(a, r, period, left_critical)));
          found = true;
        }
      }
      b = nb;
      gb = gn;
    }
    if (!found) {
      throw PreconditionError("period-doubling cascade lost at level " + std::to_string(n) +
                              "; last resolved level " + std::to_string(n - 1));
    }
  }

  for (std::size_t n = 1; n < est.parameters.size(); ++n) {
    est.distances.push_back(orbit_of_critical(a, est.parameters[n], std::size_t{1} << (n - 1), xc) -
                            xc);
  }
  const auto& B = est.parameters;
  for (std::size_t n = 1; n + 2 < B.size(); ++n) {
    est.delta.push_back((B[n + 1] - B[n]) / (B[n + 2] - B[n + 1]));
  }
  for (std::size_t n = 1; n < est.distances.size(); ++n) {
    est.alpha.push_back(est.distances[n - 1] / est.distances[n]);
  }
  return est;
}

double superstable_level(double a, double b) {
  LinearTwoParams{a, b}.validate();
  const double ab = a * b;
  return 1.0 / ab + 1.0 / (b + ab * std::exp(1.0 - ab));
}

double both_critical_curve(double a) {
  if (!(a > 1.0)) throw DomainError("both-critical curve needs a > 1");
  return (2.0 * std::log(a - 1.0) + 1.0) / a;
}

double solve_superstable_level(double b, double level, double a_lo, double a_hi) {
  double flo = superstable_level(a_lo, b) - level;
  const double fhi = superstable_level(a_hi, b) - level;
  if ((flo < 0.0) == (fhi < 0.0)) throw PreconditionError("level not bracketed by the a range");
  for (int it = 0; it < 200 && a_hi - a_lo > 1e-14 * a_hi; ++it) {
    const double mid = 0.5 * (a_lo + a_hi);
    const double fm = superstable_level(mid, b) - level;
    if ((fm < 0.0) == (flo < 0.0)) {
      a_lo = mid;
      flo = fm;
    } else {
      a_hi = mid;
    }
  }
  return 0.5 * (a_lo + a_hi);
}

double schwarzian(const LinearTwoParams& p, double x) {
  p.validate();
  if (!(x > 0.0 && x < 1.0)) throw DomainError("state x must lie in (0,1)");
  const double q = x * (1.0 - x);
  if (std::abs(1.0 - p.a * q) < 1e-12) {
    throw PreconditionError("critical point, Schwarzian undefined");
  }
  // f = sigma(t), t = logit(x) - a(x-b); ratios avoid underflow of sigma'.
  const double t = logit(x) - p.a * (x - p.b);
  const double s = logistic(t);
  const double u = logistic(-t);
  const double su = s * u;
  const double t1 = 1.0 / q - p.a;
  const double t2 = -1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x));
  const double t3 = 2.0 / (x * x * x) + 2.0 / ((1.0 - x) * (1.0 - x) * (1.0 - x));
  const double r3 = (1.0 - 6.0 * su) * t1 * t1 + 3.0 * (u - s) * t2 + t3 / t1;
  const double r2 = (u - s) * t1 + t2 / t1;
  return r3 - 1.5 * r2 * r2;
}

namespace {

bool same_cycle(const PeriodResult& l, const PeriodResult& r, double tol) {
  if (l.period != r.period) return false;
  if (l.aperiodic()) return true;  // undecidable; not reported as coexistence
  return std::all_of(l.orbit_points.begin(), l.orbit_points.end(), [&](double x) {
    return std::any_of(r.orbit_points.begin(), r.orbit_points.end(),
                       [&](double y) { return std::abs(x - y) < tol; });
  });
}

}  // namespace

Coexistence coexisting_attractors(const LinearTwoParams& p, const PeriodOptions& opts,
                                  double match_tol) {
  const auto cs = critical_structure(p);
  const MapSpec map{p};
  Coexistence c;
  c.left = detect_period(map, cs.x_l, opts);
  c.right = detect_period(map, cs.x_r, opts);
  c.coexist = !same_cycle(c.left, c.right, match_tol);
  return c;
}

std::vector<double> scan_coexistence(double b, double a_min, double a_max, std::size_t steps,
                                     const PeriodOptions& opts) {
  if (steps == 0 || !(a_max >= a_min) || !(a_min > 4.0)) {
    throw DomainError("coexistence scan needs 4 < a_min <= a_max and steps >= 1");
  }
  std::vector<double> hits;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double a = a_min + (a_max - a_min) * static_cast<double>(k) / static_cast<double>(steps);
    if (coexisting_attractors({a, b}, opts).coexist) hits.push_back(a);
  }
  return hits;
}

}  // namespace mwu

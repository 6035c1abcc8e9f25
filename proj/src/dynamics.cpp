#include "mwu/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mwu/errors.hpp"

namespace mwu {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }
bool open_unit(double v) { return std::isfinite(v) && v > 0.0 && v < 1.0; }

void require_open_unit(double x, const char* what) {
  if (!open_unit(x)) {
    throw DomainError(std::string(what) + " must lie in the open interval (0,1), got " +
                      std::to_string(x));
  }
}

// log(1/(1+exp(-t)))
double log_logistic(double t) {
  return t < 0.0 ? t - std::log1p(std::exp(t)) : -std::log1p(std::exp(-t));
}

// s(1-s)/(x(1-x)) with s = logistic(t), evaluated in log space.
double logistic_slope_ratio(double t, double x) {
  return std::exp(log_logistic(t) + log_logistic(-t) - std::log(x) - std::log1p(-x));
}

}  // namespace

void GameEconomics::validate() const {
  if (!finite_positive(alpha) || !finite_positive(beta)) {
    throw DomainError("cost slopes alpha and beta must be positive");
  }
  if (!finite_positive(demand_N)) throw DomainError("total demand N must be positive");
  require_open_unit(epsilon, "learning rate epsilon");
}

void LinearTwoParams::validate() const {
  if (!finite_positive(a)) throw DomainError("normalized demand a must be positive");
  require_open_unit(b, "equilibrium split b");
}

void SimplexParams::validate() const {
  if (rates.size() < 2) throw DomainError("simplex map needs at least two paths");
  for (double r : rates) {
    if (!finite_positive(r)) throw DomainError("simplex rates must be strictly positive");
  }
}

void PolynomialParams::validate() const {
  if (!finite_positive(a)) throw DomainError("normalized demand a must be positive");
  require_open_unit(b, "equilibrium split b");
  if (degree < 1) throw DomainError("polynomial degree must be at least 1");
}

void HeteroParams::validate() const {
  if (!finite_positive(a1) || !finite_positive(a2)) {
    throw DomainError("population rates a1, a2 must be positive");
  }
  require_open_unit(b, "equilibrium split b");
  require_open_unit(eta1, "population share eta1");
  require_open_unit(eta2, "population share eta2");
  if (std::abs(eta1 + eta2 - 1.0) > 1e-12) throw DomainError("eta1 + eta2 must equal 1");
}

std::size_t MapSpec::dimension() const {
  switch (family()) {
    case MapFamily::simplex:
      return std::get<SimplexParams>(params).size();
    case MapFamily::hetero2:
      return 2;
    default:
      return 1;
  }
}

bool MapSpec::is_scalar() const {
  return family() == MapFamily::linear2 || family() == MapFamily::polynomial2;
}

void MapSpec::validate() const {
  std::visit([](const auto& p) { p.validate(); }, params);
}

double logit(double x) { return std::log(x) - std::log1p(-x); }

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double clamp_interior(double x, bool* saturated) {
  if (x <= 0.0) {
    if (saturated) *saturated = true;
    return std::numeric_limits<double>::denorm_min();
  }
  if (x >= 1.0) {
    if (saturated) *saturated = true;
    return std::nextafter(1.0, 0.0);
  }
  return x;
}

LinearTwoParams normalize_economics(const GameEconomics& econ) {
  econ.validate();
  const double s = econ.alpha + econ.beta;
  return {s * econ.demand_N * -std::log1p(-econ.epsilon), econ.beta / s};
}

double step_linear2(double x, const LinearTwoParams& p, bool* saturated) {
  require_open_unit(x, "state x");
  return clamp_interior(logistic(logit(x) - p.a * (x - p.b)), saturated);
}

double step_linear2_direct(double x, const LinearTwoParams& p) {
  return x / (x + (1.0 - x) * std::exp(p.a * (x - p.b)));
}

double step_linear2_closed(double x, const LinearTwoParams& p) {
  if (x == 0.0 || x == 1.0) return x;
  return step_linear2(x, p);
}

double derivative_linear2(double x, const LinearTwoParams& p) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("derivative requires x in [0,1]");
  if (x == 0.0) return std::exp(p.a * p.b);
  if (x == 1.0) return std::exp(p.a * (1.0 - p.b));
  const double t = logit(x) - p.a * (x - p.b);
  return (1.0 - p.a * x * (1.0 - x)) * logistic_slope_ratio(t, x);
}

Derivatives3 derivatives_linear2(double x, const LinearTwoParams& p) {
  require_open_unit(x, "state x");
  const double t = logit(x) - p.a * (x - p.b);
  const double s = logistic(t);
  const double u = logistic(-t);
  const double su = std::exp(log_logistic(t) + log_logistic(-t));
  const double q = x * (1.0 - x);
  // derivatives of t(x) = logit(x) - a(x-b)
  const double t1 = 1.0 / q - p.a;
  const double t2 = -1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x));
  const double t3 = 2.0 / (x * x * x) + 2.0 / ((1.0 - x) * (1.0 - x) * (1.0 - x));
  const double sig1 = su;
  const double sig2 = su * (u - s);
  const double sig3 = su * (1.0 - 6.0 * s * u);
  return {sig1 * t1, sig2 * t1 * t1 + sig1 * t2,
          sig3 * t1 * t1 * t1 + 3.0 * sig2 * t1 * t2 + sig1 * t3};
}

CriticalStructure critical_structure(const LinearTwoParams& p) {
  p.validate();
  if (p.a <= 4.0) {
    throw PreconditionError("a <= 4: the map is a homeomorphism with no critical points");
  }
  CriticalStructure cs;
  cs.x_l = 0.5 * (1.0 - std::sqrt(1.0 - 4.0 / p.a));
  cs.x_r = 1.0 - cs.x_l;
  cs.y_max = step_linear2(cs.x_l, p);
  cs.y_min = step_linear2(cs.x_r, p);
  return cs;
}

double potential(double x, const LinearTwoParams& p) {
  return 0.5 * p.a * p.a * ((1.0 - p.b) * x * x + p.b * (1.0 - x) * (1.0 - x));
}

void require_interior_simplex(std::span<const double> x, std::size_t m) {
  if (x.size() != m) {
    throw DomainError("state has " + std::to_string(x.size()) + " coordinates, expected " +
                      std::to_string(m));
  }
  double sum = 0.0;
  for (double v : x) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw DomainError("simplex state must have strictly positive coordinates");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("simplex state must sum to 1");
}

namespace {

std::vector<double> normalize_log_weights(std::vector<double> logw, bool* saturated) {
  const double top = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  for (double v : logw) z += std::exp(v - top);
  const double lse = top + std::log(z);
  for (double& v : logw) {
    v = std::exp(v - lse);
    if (v <= 0.0) {
      if (saturated) *saturated = true;
      v = std::numeric_limits<double>::denorm_min();
    }
  }
  return logw;
}

}  // namespace

std::vector<double> step_simplex(std::span<const double> x, const SimplexParams& p,
                                 bool* saturated) {
  require_interior_simplex(x, p.size());
  std::vector<double> logw(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) logw[i] = std::log(x[i]) - p.rates[i] * x[i];
  return normalize_log_weights(std::move(logw), saturated);
}

std::vector<double> mwu_update(std::span<const double> x, std::span<const double> costs,
                               double epsilon) {
  require_open_unit(epsilon, "learning rate epsilon");
  require_interior_simplex(x, costs.size());
  const double log_keep = std::log1p(-epsilon);
  std::vector<double> logw(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) logw[i] = std::log(x[i]) + costs[i] * log_keep;
  return normalize_log_weights(std::move(logw), nullptr);
}

std::vector<double> simplex_equilibrium(std::span<const double> rates) {
  SimplexParams{{rates.begin(), rates.end()}}.validate();
  double harmonic = 0.0;
  for (double r : rates) harmonic += 1.0 / r;
  std::vector<double> b(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) b[i] = (1.0 / rates[i]) / harmonic;
  return b;
}

namespace {

double reduced_rate(const SimplexParams& p, std::size_t special) {
  double inv = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k != special) inv += 1.0 / p.rates[k];
  }
  return 1.0 / inv;
}

void check_special(const SimplexParams& p, std::size_t special) {
  p.validate();
  if (special >= p.size()) throw DomainError("special index out of range");
}

}  // namespace

std::vector<double> embed_segment(double x, const SimplexParams& p, std::size_t special_index) {
  check_special(p, special_index);
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("segment coordinate must lie in [0,1]");
  const double pstar = reduced_rate(p, special_index);
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = i == special_index ? 1.0 - x : pstar * x / p.rates[i];
  }
  return out;
}

LinearTwoParams segment_conjugate(const SimplexParams& p, std::size_t special_index) {
  check_special(p, special_index);
  const double pstar = reduced_rate(p, special_index);
  const double ps = p.rates[special_index];
  return {pstar + ps, ps / (pstar + ps)};
}

double segment_coordinate(std::span<const double> x, std::size_t special_index) {
  if (special_index >= x.size()) throw DomainError("special index out of range");
  return 1.0 - x[special_index];
}

double polynomial_drive(double x, const PolynomialParams& p) {
  if (p.degree == 1) return x - p.b;
  return (1.0 - p.b) * std::pow(x, p.degree) - p.b * std::pow(1.0 - x, p.degree);
}

double polynomial_drive_slope(double x, const PolynomialParams& p) {
  if (p.degree == 1) return 1.0;
  const int k = p.degree - 1;
  return p.degree * ((1.0 - p.b) * std::pow(x, k) + p.b * std::pow(1.0 - x, k));
}

double step_polynomial(double x, const PolynomialParams& p, bool* saturated) {
  require_open_unit(x, "state x");
  return clamp_interior(logistic(logit(x) - p.a * polynomial_drive(x, p)), saturated);
}

double derivative_polynomial(double x, const PolynomialParams& p) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("derivative requires x in [0,1]");
  if (x == 0.0) return std::exp(-p.a * polynomial_drive(0.0, p));
  if (x == 1.0) return std::exp(p.a * polynomial_drive(1.0, p));
  const double t = logit(x) - p.a * polynomial_drive(x, p);
  return (1.0 - p.a * x * (1.0 - x) * polynomial_drive_slope(x, p)) * logistic_slope_ratio(t, x);
}

double polynomial_equilibrium(const PolynomialParams& p) {
  p.validate();
  const double r = std::pow(p.b, 1.0 / p.degree);
  const double s = std::pow(1.0 - p.b, 1.0 / p.degree);
  return r / (r + s);
}

std::pair<double, double> step_hetero_logit(double z, double w, const HeteroParams& p) {
  const double drive = p.eta1 * logistic(z) + p.eta2 * logistic(w) - p.b;
  return {z - p.a1 * drive, w - p.a2 * drive};
}

std::pair<double, double> step_hetero(double x, double y, const HeteroParams& p, bool* saturated) {
  require_open_unit(x, "state x");
  require_open_unit(y, "state y");
  const double drive = p.eta1 * x + p.eta2 * y - p.b;
  return {clamp_interior(logistic(logit(x) - p.a1 * drive), saturated),
          clamp_interior(logistic(logit(y) - p.a2 * drive), saturated)};
}

double hetero_invariant(double x, double y, const HeteroParams& p) {
  require_open_unit(x, "state x");
  require_open_unit(y, "state y");
  return p.a1 * logit(y) - p.a2 * logit(x);
}

LinearTwoParams reduce_atomic_two(double alpha1, double alpha2, int N, double epsilon) {
  if (!finite_positive(alpha1) || !finite_positive(alpha2)) {
    throw DomainError("cost slopes must be positive");
  }
  if (N < 2) throw DomainError("atomic game needs at least two agents");
  require_open_unit(epsilon, "learning rate epsilon");
  if (!(alpha2 * N > alpha1 && alpha1 * N > alpha2)) {
    throw PreconditionError(
        "no symmetric interior equilibrium: need alpha2 < N*alpha1 and alpha1 < N*alpha2");
  }
  const double sum = alpha1 + alpha2;
  return {(N - 1) * sum * -std::log1p(-epsilon), (alpha2 * N - alpha1) / (sum * (N - 1))};
}

SimplexParams reduce_atomic_m(double alpha, int N, double epsilon, int m) {
  if (!finite_positive(alpha)) throw DomainError("cost slope must be positive");
  if (N < 2) throw DomainError("atomic game needs at least two agents");
  if (m < 2) throw DomainError("need at least two paths");
  require_open_unit(epsilon, "learning rate epsilon");
  return {std::vector<double>(static_cast<std::size_t>(m), (N - 1) * alpha * -std::log1p(-epsilon))};
}

double step_atomic_two(double x, double alpha1, double alpha2, int N, double epsilon) {
  require_open_unit(x, "state x");
  const double c1 = alpha1 * (1.0 + (N - 1) * x);
  const double c2 = alpha2 * (1.0 + (N - 1) * (1.0 - x));
  const double log_keep = std::log1p(-epsilon);
  const double lw1 = std::log(x) + c1 * log_keep;
  const double lw2 = std::log1p(-x) + c2 * log_keep;
  return clamp_interior(logistic(lw1 - lw2));
}

std::vector<double> atomic_costs(std::span<const double> x, double alpha, int N) {
  std::vector<double> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = alpha * (1.0 + (N - 1) * x[i]);
  return c;
}

double step_scalar(const MapSpec& map, double x, bool* saturated) {
  switch (map.family()) {
    case MapFamily::linear2:
      return step_linear2(x, std::get<LinearTwoParams>(map.params), saturated);
    case MapFamily::polynomial2:
      return step_polynomial(x, std::get<PolynomialParams>(map.params), saturated);
    default:
      throw DomainError("scalar step requested for a vector-valued map family");
  }
}

double derivative_scalar(const MapSpec& map, double x) {
  switch (map.family()) {
    case MapFamily::linear2:
      return derivative_linear2(x, std::get<LinearTwoParams>(map.params));
    case MapFamily::polynomial2:
      return derivative_polynomial(x, std::get<PolynomialParams>(map.params));
    default:
      throw DomainError("derivative requested for a vector-valued map family");
  }
}

void step_state(const MapSpec& map, std::span<double> state, bool* saturated) {
  if (state.size() != map.dimension()) throw DomainError("state dimension does not match map");
  switch (map.family()) {
    case MapFamily::linear2:
    case MapFamily::polynomial2:
      state[0] = step_scalar(map, state[0], saturated);
      return;
    case MapFamily::simplex: {
      const auto next = step_simplex(state, std::get<SimplexParams>(map.params), saturated);
      std::copy(next.begin(), next.end(), state.begin());
      return;
    }
    case MapFamily::hetero2: {
      const auto [x, y] =
          step_hetero(state[0], state[1], std::get<HeteroParams>(map.params), saturated);
      state[0] = x;
      state[1] = y;
      return;
    }
  }
}

}  // namespace mwu

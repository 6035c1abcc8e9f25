#pragma once

// Map families generated by Multiplicative Weights Update in parallel-link
// congestion games, their parameterizations and equilibria.
//
// Every update is carried out in logit (two strategies) or log-weight
// (m strategies) coordinates so that large demand never overflows exp().

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace mwu {

/// Raw two-path game: costs c1 = alpha*N*x, c2 = beta*N*(1-x), MWU rate epsilon.
struct GameEconomics {
  double alpha = 0.5;
  double beta = 0.5;
  double demand_N = 1.0;
  double epsilon = 0.6321205588285577;  // 1 - 1/e, so that a = N when alpha+beta = 1

  void validate() const;
};

/// Normalized demand a and equilibrium split b of the linear two-path game.
struct LinearTwoParams {
  double a = 0.0;
  double b = 0.5;

  void validate() const;
};

/// Critical points of f_{a,b} (defined only for a > 4) and their images.
struct CriticalStructure {
  double x_l = 0.0;
  double x_r = 0.0;
  double y_min = 0.0;  // f(x_r)
  double y_max = 0.0;  // f(x_l)
};

/// Rates a_i = N * alpha_i * ln(1/(1-eps)) of an m-path game.
struct SimplexParams {
  std::vector<double> rates;

  [[nodiscard]] std::size_t size() const { return rates.size(); }
  void validate() const;
};

/// Two paths with monomial costs of common degree.
struct PolynomialParams {
  double a = 0.0;
  double b = 0.5;
  int degree = 1;

  void validate() const;
};

/// Two subpopulations with their own learning rates sharing two paths.
struct HeteroParams {
  double a1 = 0.0;
  double a2 = 0.0;
  double b = 0.5;
  double eta1 = 0.5;
  double eta2 = 0.5;

  void validate() const;
};

enum class MapFamily { linear2, simplex, polynomial2, hetero2 };

/// Tagged choice of which map to iterate. The tag is the active alternative.
struct MapSpec {
  std::variant<LinearTwoParams, SimplexParams, PolynomialParams, HeteroParams> params;

  [[nodiscard]] MapFamily family() const { return static_cast<MapFamily>(params.index()); }
  /// Number of coordinates in a state of this map.
  [[nodiscard]] std::size_t dimension() const;
  /// True for the one-dimensional families (linear2, polynomial2).
  [[nodiscard]] bool is_scalar() const;
  void validate() const;
};

// ---------------------------------------------------------------------------
// scalar helpers

/// log(x/(1-x)) for x in (0,1).
double logit(double x);

/// Logistic function 1/(1+exp(-t)) without overflow for any finite t.
double logistic(double t);

/// Maps an iterate that rounded onto {0,1} to the adjacent interior double.
/// Sets *saturated when a replacement happened.
double clamp_interior(double x, bool* saturated = nullptr);

// ---------------------------------------------------------------------------
// linear two-path game

LinearTwoParams normalize_economics(const GameEconomics& econ);

/// f_{a,b}(x) = x / (x + (1-x) exp(a(x-b))), evaluated as
/// logit(f) = logit(x) - a(x-b). Requires 0 < x < 1.
double step_linear2(double x, const LinearTwoParams& p, bool* saturated = nullptr);

/// Direct rational form of the same map; kept as a cross-check path.
double step_linear2_direct(double x, const LinearTwoParams& p);

/// Same map extended to the closed interval; 0 and 1 are fixed.
double step_linear2_closed(double x, const LinearTwoParams& p);

/// f'_{a,b}(x) on [0,1].
double derivative_linear2(double x, const LinearTwoParams& p);

/// First three derivatives of f_{a,b} at an interior point.
struct Derivatives3 {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};
Derivatives3 derivatives_linear2(double x, const LinearTwoParams& p);

/// Throws PreconditionError for a <= 4, where f is a homeomorphism.
CriticalStructure critical_structure(const LinearTwoParams& p);

/// Phi_{a,b}(x) = (a^2/2)((1-b)x^2 + b(1-x)^2); minimized at x = b.
double potential(double x, const LinearTwoParams& p);

// ---------------------------------------------------------------------------
// m paths

/// One MWU step on the open simplex, in log space. Requires strictly
/// positive coordinates summing to one.
std::vector<double> step_simplex(std::span<const double> x, const SimplexParams& p,
                                 bool* saturated = nullptr);

/// Generic MWU update x_i <- x_i (1-eps)^{c_i} / Z for an arbitrary cost vector.
std::vector<double> mwu_update(std::span<const double> x, std::span<const double> costs,
                               double epsilon);

/// Equal-cost flow: b_i proportional to 1/a_i.
std::vector<double> simplex_equilibrium(std::span<const double> rates);

/// Point on the invariant segment through the special vertex; see
/// segment_conjugate for the induced one-dimensional map.
std::vector<double> embed_segment(double x, const SimplexParams& p, std::size_t special_index);

/// Parameters of the linear map the simplex map induces on the segment
/// used by embed_segment.
LinearTwoParams segment_conjugate(const SimplexParams& p, std::size_t special_index);

/// Inverse of embed_segment: the segment coordinate 1 - x_special.
double segment_coordinate(std::span<const double> x, std::size_t special_index);

/// Checks that x is an interior probability vector of the expected size.
void require_interior_simplex(std::span<const double> x, std::size_t m);

// ---------------------------------------------------------------------------
// polynomial costs

/// P_b(x) = (1-b)x^p - b(1-x)^p.
double polynomial_drive(double x, const PolynomialParams& p);
double polynomial_drive_slope(double x, const PolynomialParams& p);

double step_polynomial(double x, const PolynomialParams& p, bool* saturated = nullptr);
double derivative_polynomial(double x, const PolynomialParams& p);

/// Unique root of P_b in (0,1).
double polynomial_equilibrium(const PolynomialParams& p);

// ---------------------------------------------------------------------------
// heterogeneous users

std::pair<double, double> step_hetero(double x, double y, const HeteroParams& p,
                                      bool* saturated = nullptr);

/// Same step on logit coordinates (z, w) = (logit x, logit y). Exact in the
/// sense that the first integral a1*w - a2*z is preserved up to rounding.
std::pair<double, double> step_hetero_logit(double z, double w, const HeteroParams& p);

/// log I(x,y) = a1 logit(y) - a2 logit(x).
double hetero_invariant(double x, double y, const HeteroParams& p);

// ---------------------------------------------------------------------------
// atomic games

/// Two paths, N agents, costs alpha_i (1 + (N-1) x_i). Throws
/// PreconditionError when the game has no symmetric interior equilibrium.
LinearTwoParams reduce_atomic_two(double alpha1, double alpha2, int N, double epsilon);

/// m identical paths with slope alpha.
SimplexParams reduce_atomic_m(double alpha, int N, double epsilon, int m);

/// Literal atomic MWU step for two paths, using the expected costs
/// alpha_i (1 + (N-1) x_i) without any change of variables.
double step_atomic_two(double x, double alpha1, double alpha2, int N, double epsilon);

/// Expected atomic costs alpha (1 + (N-1) x_i) for m identical paths.
std::vector<double> atomic_costs(std::span<const double> x, double alpha, int N);

// ---------------------------------------------------------------------------
// family-generic stepping

/// One application of the map to a state of matching dimension.
void step_state(const MapSpec& map, std::span<double> state, bool* saturated = nullptr);

/// f(x) for the scalar families.
double step_scalar(const MapSpec& map, double x, bool* saturated = nullptr);

/// f'(x) for the scalar families.
double derivative_scalar(const MapSpec& map, double x);

}  // namespace mwu

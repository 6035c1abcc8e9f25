#pragma once

// Orbit engine: iteration with transients, periodic-orbit detection,
// Lyapunov exponents, symbolic itineraries and cobweb traces.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mwu/dynamics.hpp"

namespace mwu {

/// Finite trajectory after a discarded transient. Samples are stored
/// row-major with `dim` coordinates per state.
struct Orbit {
  MapSpec map;
  std::vector<double> x0;
  std::size_t transient = 0;
  std::size_t dim = 1;
  std::vector<double> data;
  bool saturated = false;

  [[nodiscard]] std::size_t size() const { return dim == 0 ? 0 : data.size() / dim; }
  [[nodiscard]] double scalar(std::size_t i) const { return data[i]; }
  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }
};

Orbit iterate(const MapSpec& map, std::span<const double> x0, std::size_t transient,
              std::size_t samples);
Orbit iterate(const MapSpec& map, double x0, std::size_t transient, std::size_t samples);

struct PeriodOptions {
  std::size_t max_period = 8;
  double tol = 1e-10;
  std::size_t transient = 20000;
  /// Leave the transient once the orbit repeats exactly with some lag
  /// p <= max_period; the result is identical to the full transient.
  bool adaptive = false;
  /// Distance to a critical point below which an orbit counts as superstable.
  double superstable_tol = 1e-6;
};

struct PeriodResult {
  /// Least period found, or empty for "aperiodic" (longer than max_period or chaotic).
  std::optional<std::size_t> period;
  /// Orbit points, `dim` coordinates each; for an aperiodic result the last
  /// max_period states visited.
  std::vector<double> orbit_points;
  std::size_t dim = 1;
  /// |f^n(x) - x| at acceptance; smallest residual seen when aperiodic.
  double residual = std::numeric_limits<double>::infinity();
  bool superstable = false;
  /// Iterations actually spent in the transient.
  std::size_t transient_used = 0;

  [[nodiscard]] bool aperiodic() const { return !period.has_value(); }
};

PeriodResult detect_period(const MapSpec& map, std::span<const double> x0,
                           const PeriodOptions& opts = {});
PeriodResult detect_period(const MapSpec& map, double x0, const PeriodOptions& opts = {});

/// Mean of log|f'(x_n)| over T post-transient states of a scalar map.
/// Returns -infinity when some derivative is exactly zero.
double lyapunov(const MapSpec& map, double x0, std::size_t T = 2000,
                std::size_t transient = 20000);

/// Exponent of a known periodic orbit: (1/n) sum log|f'(p_i)|.
double cycle_lyapunov(const MapSpec& map, std::span<const double> points);

/// 'A' on [x_l, x_r], 'B' below x_l, 'C' above x_r.
char symbol_of(double x, const CriticalStructure& cs);
std::string symbolic_code(const Orbit& orbit, const CriticalStructure& cs);

struct CobwebSegment {
  double from = 0.0;
  double to = 0.0;
  /// Potential at `from` for linear2; NaN for other families.
  double potential_from = 0.0;
  double potential_to = 0.0;
};

std::vector<CobwebSegment> cobweb_trace(const MapSpec& map, double x0, std::size_t steps);

/// Drift of the first integral along a heterogeneous-population orbit,
/// iterated in logit coordinates.
struct InvariantDrift {
  double initial = 0.0;
  double max_step = 0.0;
  double cumulative = 0.0;  // |I_n - I_0| maximized over the run
};

InvariantDrift hetero_invariant_drift(const HeteroParams& p, double x0, double y0,
                                      std::size_t steps);

}  // namespace mwu

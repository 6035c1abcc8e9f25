#pragma once

// Parameter sweeps over (a, b): bifurcation scans, period diagrams,
// Lyapunov heatmaps and metric curves, with CSV and binary PPM output.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mwu/dynamics.hpp"
#include "mwu/orbit.hpp"

namespace mwu {

/// `steps` points from min to max inclusive; a single step yields min.
struct Range {
  double min = 0.0;
  double max = 0.0;
  std::size_t steps = 1;

  [[nodiscard]] double at(std::size_t i) const;
  void validate(const char* what) const;
};

/// Parses "lo:hi" or "lo:hi:steps".
Range parse_range(const std::string& text, std::size_t default_steps);

enum class InitRule { left_critical, right_critical, fixed };

struct InitSpec {
  InitRule rule = InitRule::left_critical;
  double value = 0.5;  // used by InitRule::fixed
};

/// Starting point for (a, b). For a <= 4 there is no critical point and
/// the critical rules fall back to 1/4 and 3/4.
double initial_state(const InitSpec& init, const LinearTwoParams& p);

struct SweepGrid {
  Range a{2.0, 54.0, 800};
  Range b{0.02, 0.98, 800};
  PeriodOptions period{};
  InitSpec init{};
  std::size_t lyapunov_T = 2000;
  /// Worker count; 0 picks the hardware concurrency.
  std::size_t threads = 0;

  void validate() const;
};

struct SweepCell {
  double a = 0.0;
  double b = 0.0;
  /// 1..8 for a detected period, 0 for longer or aperiodic orbits.
  int period_code = 0;
  /// NaN when not computed.
  double lyapunov = 0.0;
};

/// Image-ordered results: row 0 holds the largest b, column 0 the smallest a.
struct CellMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<SweepCell> cells;

  [[nodiscard]] const SweepCell& at(std::size_t r, std::size_t c) const {
    return cells[r * cols + c];
  }
};

enum class CellContent { period, lyapunov, both };

/// Runs fn(i) for i in [0, n) on `threads` workers (0 = hardware).
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

SweepCell evaluate_cell(double a, double b, const SweepGrid& grid, CellContent content);

/// One image row (fixed b index counted from the top) across all a.
std::vector<SweepCell> sweep_row(const SweepGrid& grid, std::size_t row, CellContent content);

CellMatrix period_diagram(const SweepGrid& grid);
CellMatrix lyapunov_heatmap(const SweepGrid& grid);
CellMatrix sweep(const SweepGrid& grid, CellContent content);

struct BifurcationRow {
  double a = 0.0;
  double x = 0.0;
  double mean_running = 0.0;
};

/// Post-transient samples per a, with the running Cesaro mean of the
/// samples seen so far at that a.
std::vector<BifurcationRow> bifurcation_scan(double b, const Range& a, const InitSpec& init,
                                             std::size_t transient, std::size_t samples,
                                             std::size_t threads = 0);

struct MetricsRow {
  double a = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double regret_avg = 0.0;
  double regret_bound = 0.0;
  double norm_sc = 0.0;
};

/// Metrics against demand with alpha + beta = 1, epsilon = 1 - 1/e, N = a.
std::vector<MetricsRow> metrics_curve(double b, const Range& a, const InitSpec& init,
                                      std::size_t transient, std::size_t T,
                                      std::size_t threads = 0);

// ---- CSV -------------------------------------------------------------

struct CsvTable {
  /// Emitted as "# " lines ahead of the header.
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// 17 significant digits, so parsing restores every value bit-exactly.
std::string format_number(double v);
std::string format_csv_row(const std::vector<double>& row);

void emit_csv(const CsvTable& table, std::ostream& out);
void write_csv(const CsvTable& table, const std::string& path);
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

CsvTable to_table(const std::vector<BifurcationRow>& rows);
CsvTable to_table(const std::vector<MetricsRow>& rows);
CsvTable to_table(const CellMatrix& m);

/// Header/comment block shared by grid CSVs.
std::vector<std::string> grid_metadata(const SweepGrid& grid, CellContent content);

struct StreamStats {
  std::size_t rows_total = 0;
  std::size_t rows_resumed = 0;
};

/// Computes the grid row by row, appending each finished image row to
/// `path` in one write. With `resume`, rows already present in a file with
/// identical metadata are kept and only the remainder is computed.
StreamStats stream_grid_csv(const SweepGrid& grid, CellContent content, const std::string& path,
                            bool resume);

/// Rebuilds a matrix from a grid CSV (rows in image order).
CellMatrix matrix_from_table(const CsvTable& table, std::size_t cols);

// ---- PPM -------------------------------------------------------------

using Rgb = std::array<std::uint8_t, 3>;

/// 1 yellow, 2 red, 3 blue, 4 green, 5 brown, 6 cyan, 7 dark gray,
/// 8 magenta, anything else white.
Rgb period_color(int period_code);

/// White below -1.5, black above 0, linear gray between; -inf is white.
Rgb lyapunov_gray(double exponent);

enum class Palette { period, lyapunov };

void emit_ppm(const CellMatrix& m, Palette palette, std::ostream& out);
void write_ppm(const CellMatrix& m, Palette palette, const std::string& path);

}  // namespace mwu

#include "mwu/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "mwu/errors.hpp"
#include "mwu/metrics.hpp"

namespace mwu {

double Range::at(std::size_t i) const {
  if (steps <= 1) return min;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

void Range::validate(const char* what) const {
  if (steps < 1) throw DomainError(std::string(what) + ": steps must be >= 1");
  if (!(std::isfinite(min) && std::isfinite(max)) || max < min) {
    throw DomainError(std::string(what) + ": range must be finite and ordered");
  }
}

Range parse_range(const std::string& text, std::size_t default_steps) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 2 && parts.size() != 3) {
    throw DomainError("range '" + text + "' must look like lo:hi or lo:hi:steps");
  }
  auto number = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw DomainError("range '" + text + "' has a bad number");
    return v;
  };
  Range r{number(parts[0]), number(parts[1]), default_steps};
  if (parts.size() == 3) {
    const double steps = number(parts[2]);
    if (!(steps >= 1.0) || steps != std::floor(steps)) {
      throw DomainError("range '" + text + "' needs an integer step count >= 1");
    }
    r.steps = static_cast<std::size_t>(steps);
  }
  r.validate("range");
  return r;
}

double initial_state(const InitSpec& init, const LinearTwoParams& p) {
  switch (init.rule) {
    case InitRule::fixed:
      if (!(init.value > 0.0 && init.value < 1.0)) throw DomainError("x0 must lie in (0,1)");
      return init.value;
    case InitRule::left_critical:
      return p.a > 4.0 ? critical_structure(p).x_l : 0.25;
    case InitRule::right_critical:
      return p.a > 4.0 ? critical_structure(p).x_r : 0.75;
  }
  return init.value;
}

void SweepGrid::validate() const {
  a.validate("a range");
  b.validate("b range");
  if (!(a.min > 0.0)) throw DomainError("a range must be positive");
  if (!(b.min > 0.0 && b.max < 1.0)) throw DomainError("b range must lie inside (0,1)");
  if (period.max_period == 0) throw DomainError("max_period must be >= 1");
  if (lyapunov_T == 0) throw DomainError("Lyapunov T must be >= 1");
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

SweepCell evaluate_cell(double a, double b, const SweepGrid& grid, CellContent content) {
  const LinearTwoParams p{a, b};
  const MapSpec map{p};
  const double x0 = initial_state(grid.init, p);
  SweepCell cell{a, b, 0, std::numeric_limits<double>::quiet_NaN()};
  if (content != CellContent::lyapunov) {
    const auto r = detect_period(map, x0, grid.period);
    cell.period_code = r.period ? static_cast<int>(*r.period) : 0;
    if (cell.period_code > 8) cell.period_code = 0;
  }
  if (content != CellContent::period) {
    cell.lyapunov = lyapunov(map, x0, grid.lyapunov_T, grid.period.transient);
  }
  return cell;
}

std::vector<SweepCell> sweep_row(const SweepGrid& grid, std::size_t row, CellContent content) {
  const double b = grid.b.at(grid.b.steps - 1 - row);
  std::vector<SweepCell> cells(grid.a.steps);
  parallel_for(grid.a.steps, grid.threads,
               [&](std::size_t c) { cells[c] = evaluate_cell(grid.a.at(c), b, grid, content); });
  return cells;
}

CellMatrix sweep(const SweepGrid& grid, CellContent content) {
  grid.validate();
  CellMatrix m;
  m.rows = grid.b.steps;
  m.cols = grid.a.steps;
  m.cells.resize(m.rows * m.cols);
  parallel_for(m.cells.size(), grid.threads, [&](std::size_t i) {
    const std::size_t r = i / m.cols;
    const std::size_t c = i % m.cols;
    m.cells[i] = evaluate_cell(grid.a.at(c), grid.b.at(m.rows - 1 - r), grid, content);
  });
  return m;
}

CellMatrix period_diagram(const SweepGrid& grid) { return sweep(grid, CellContent::period); }

CellMatrix lyapunov_heatmap(const SweepGrid& grid) { return sweep(grid, CellContent::both); }

std::vector<BifurcationRow> bifurcation_scan(double b, const Range& a, const InitSpec& init,
                                             std::size_t transient, std::size_t samples,
                                             std::size_t threads) {
  a.validate("a range");
  std::vector<std::vector<BifurcationRow>> blocks(a.steps);
  parallel_for(a.steps, threads, [&](std::size_t i) {
    const LinearTwoParams p{a.at(i), b};
    const auto orbit = iterate(MapSpec{p}, initial_state(init, p), transient, samples);
    auto& block = blocks[i];
    block.reserve(samples);
    double sum = 0.0;
    for (std::size_t k = 0; k < orbit.size(); ++k) {
      sum += orbit.scalar(k);
      block.push_back({p.a, orbit.scalar(k), sum / static_cast<double>(k + 1)});
    }
  });
  std::vector<BifurcationRow> rows;
  rows.reserve(a.steps * samples);
  for (auto& block : blocks) rows.insert(rows.end(), block.begin(), block.end());
  return rows;
}

std::vector<MetricsRow> metrics_curve(double b, const Range& a, const InitSpec& init,
                                      std::size_t transient, std::size_t T, std::size_t threads) {
  a.validate("a range");
  if (T == 0) throw DomainError("T must be >= 1");
  std::vector<MetricsRow> rows(a.steps);
  parallel_for(a.steps, threads, [&](std::size_t i) {
    const LinearTwoParams p{a.at(i), b};
    const auto orbit = iterate(MapSpec{p}, initial_state(init, p), transient, T);
    const auto report = metrics_report(orbit, unit_economics(p));
    rows[i] = {p.a,
               report.cesaro_mean,
               report.variance,
               report.regret_avg,
               report.regret_bound,
               report.norm_social_cost};
  });
  return rows;
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

std::string format_csv_row(const std::vector<double>& row) {
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += ',';
    line += format_number(row[i]);
  }
  line += '\n';
  return line;
}

void emit_csv(const CsvTable& table, std::ostream& out) {
  for (const auto& c : table.comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) out << format_csv_row(row);
}

namespace {

std::ofstream open_output(const std::string& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> row;
  std::stringstream ss(line);
  for (std::string field; std::getline(ss, field, ',');) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || *end != '\0') throw DomainError("bad CSV field '" + field + "'");
    row.push_back(v);
  }
  return row;
}

}  // namespace

void write_csv(const CsvTable& table, const std::string& path) {
  auto out = open_output(path, std::ios::binary | std::ios::trunc);
  emit_csv(table, out);
  finish(out, path);
}

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  bool have_header = false;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    if (!have_header && line.rfind("# ", 0) == 0) {
      table.comments.push_back(line.substr(2));
      continue;
    }
    if (!have_header) {
      std::stringstream ss(line);
      for (std::string name; std::getline(ss, name, ',');) table.header.push_back(name);
      have_header = true;
      continue;
    }
    auto row = parse_row(line);
    if (row.size() != table.header.size()) throw DomainError("CSV row width differs from header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return parse_csv(in);
}

CsvTable to_table(const std::vector<BifurcationRow>& rows) {
  CsvTable t;
  t.header = {"a", "x", "mean_running"};
  t.rows.reserve(rows.size());
  for (const auto& r : rows) t.rows.push_back({r.a, r.x, r.mean_running});
  return t;
}

CsvTable to_table(const std::vector<MetricsRow>& rows) {
  CsvTable t;
  t.header = {"a", "mean", "variance", "regret_avg", "regret_bound", "norm_sc"};
  t.rows.reserve(rows.size());
  for (const auto& r : rows) {
    t.rows.push_back({r.a, r.mean, r.variance, r.regret_avg, r.regret_bound, r.norm_sc});
  }
  return t;
}

CsvTable to_table(const CellMatrix& m) {
  CsvTable t;
  t.header = {"a", "b", "period_code", "lyapunov"};
  t.rows.reserve(m.cells.size());
  for (const auto& c : m.cells) {
    t.rows.push_back({c.a, c.b, static_cast<double>(c.period_code), c.lyapunov});
  }
  return t;
}

std::vector<std::string> grid_metadata(const SweepGrid& grid, CellContent content) {
  const char* init = grid.init.rule == InitRule::left_critical    ? "x_l"
                     : grid.init.rule == InitRule::right_critical ? "x_r"
                                                                  : "fixed";
  const char* what = content == CellContent::period     ? "period"
                     : content == CellContent::lyapunov ? "lyapunov"
                                                        : "period+lyapunov";
  return {
      fmt::format("content={}", what),
      fmt::format("a={}:{}:{}", format_number(grid.a.min), format_number(grid.a.max),
                  grid.a.steps),
      fmt::format("b={}:{}:{}", format_number(grid.b.min), format_number(grid.b.max),
                  grid.b.steps),
      fmt::format("transient={} tol={} max_period={} lyapunov_T={}", grid.period.transient,
                  format_number(grid.period.tol), grid.period.max_period, grid.lyapunov_T),
      fmt::format("init={} x0={}", init, format_number(grid.init.value)),
      "rows=image order, first row is the largest b",
  };
}

StreamStats stream_grid_csv(const SweepGrid& grid, CellContent content, const std::string& path,
                            bool resume) {
  grid.validate();
  CsvTable head;
  head.comments = grid_metadata(grid, content);
  head.header = to_table(CellMatrix{}).header;
  std::ostringstream preamble;
  emit_csv(head, preamble);

  StreamStats stats;
  stats.rows_total = grid.b.steps;
  const std::size_t cols = grid.a.steps;

  if (resume && std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::string existing((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string& pre = preamble.str();
    if (existing.compare(0, pre.size(), pre) == 0) {
      // keep only complete lines, then only whole image rows
      std::size_t end = existing.rfind('\n');
      std::size_t lines = 0;
      for (std::size_t i = pre.size(); i <= end && end != std::string::npos; ++i) {
        if (existing[i] == '\n') ++lines;
      }
      stats.rows_resumed = std::min(lines / cols, stats.rows_total);
      std::size_t keep = pre.size();
      for (std::size_t n = 0; n < stats.rows_resumed * cols; ++n) {
        keep = existing.find('\n', keep) + 1;
      }
      std::filesystem::resize_file(path, keep);
    } else {
      stats.rows_resumed = 0;
    }
  }

  std::ofstream out;
  if (stats.rows_resumed > 0) {
    out = open_output(path, std::ios::binary | std::ios::app);
  } else {
    out = open_output(path, std::ios::binary | std::ios::trunc);
    out << preamble.str();
    finish(out, path);
  }
  for (std::size_t r = stats.rows_resumed; r < stats.rows_total; ++r) {
    const auto cells = sweep_row(grid, r, content);
    std::string block;
    for (const auto& c : cells) {
      block += format_csv_row({c.a, c.b, static_cast<double>(c.period_code), c.lyapunov});
    }
    out << block;
    finish(out, path);
  }
  return stats;
}

CellMatrix matrix_from_table(const CsvTable& table, std::size_t cols) {
  if (cols == 0 || table.rows.size() % cols != 0) {
    throw DomainError("grid CSV does not hold whole rows of the given width");
  }
  CellMatrix m;
  m.cols = cols;
  m.rows = table.rows.size() / cols;
  m.cells.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (row.size() != 4) throw DomainError("grid CSV rows need 4 columns");
    m.cells.push_back({row[0], row[1], static_cast<int>(row[2]), row[3]});
  }
  return m;
}

Rgb period_color(int period_code) {
  switch (period_code) {
    case 1: return {255, 255, 0};
    case 2: return {255, 0, 0};
    case 3: return {0, 0, 255};
    case 4: return {0, 255, 0};
    case 5: return {150, 75, 0};
    case 6: return {0, 255, 255};
    case 7: return {90, 90, 90};
    case 8: return {255, 0, 255};
    default: return {255, 255, 255};
  }
}

Rgb lyapunov_gray(double exponent) {
  if (std::isnan(exponent) || exponent >= 0.0) return {0, 0, 0};
  if (exponent <= -1.5) return {255, 255, 255};
  const auto v = static_cast<std::uint8_t>(std::lround(255.0 * (-exponent / 1.5)));
  return {v, v, v};
}

void emit_ppm(const CellMatrix& m, Palette palette, std::ostream& out) {
  out << "P6\n" << m.cols << ' ' << m.rows << "\n255\n";
  std::string pixels;
  pixels.reserve(3 * m.cells.size());
  for (const auto& c : m.cells) {
    const Rgb rgb = palette == Palette::period ? period_color(c.period_code) : lyapunov_gray(c.lyapunov);
    pixels.append(reinterpret_cast<const char*>(rgb.data()), 3);
  }
  out.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
}

void write_ppm(const CellMatrix& m, Palette palette, const std::string& path) {
  auto out = open_output(path, std::ios::binary | std::ios::trunc);
  emit_ppm(m, palette, out);
  finish(out, path);
}

}  // namespace mwu

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed constants below, never tuned to
// the measured values.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mwu/chaos.hpp"
#include "mwu/cli.hpp"
#include "mwu/dynamics.hpp"
#include "mwu/metrics.hpp"
#include "mwu/orbit.hpp"
#include "mwu/sweep.hpp"
#include "oracles.hpp"

using namespace mwu;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("%s  %2d  %s  [%s]\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
}

void report_structural(const char* id, bool ok, const std::string& title,
                       const std::string& detail) {
  if (!ok) ++failures;
  std::printf("%s  %s  %s  [%s]\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

Orbit orbit_from_init(const LinearTwoParams& p, std::size_t transient, std::size_t T) {
  return iterate(MapSpec{p}, initial_state({}, p), transient, T);
}

// 1 ------------------------------------------------------------------------
void symmetric_threshold() {
  bool ok = true;
  double slowest = 0.0;
  std::string got;
  for (auto [a, want] : {std::pair{4.0, 1}, {6.0, 1}, {7.9, 1}, {8.1, 2}, {10.0, 2}, {20.0, 2}}) {
    const LinearTwoParams p{a, 0.5};
    const auto t0 = Clock::now();
    const auto r = detect_period(MapSpec{p}, initial_state({}, p));
    slowest = std::max(slowest, seconds_since(t0));
    const int period = r.period ? static_cast<int>(*r.period) : 0;
    got += (got.empty() ? "" : ",") + std::to_string(period);
    ok = ok && period == want;
  }
  ok = ok && slowest < 1.0;
  report(1, ok, "symmetric threshold at a = 8",
         "periods " + got + "; slowest cell " + fmt("%.3g s", slowest));
}

// 2 ------------------------------------------------------------------------
void period_two_closed_form() {
  const LinearTwoParams p{10, 0.5};
  const auto r = detect_period(MapSpec{p}, initial_state({}, p));
  bool ok = r.period && *r.period == 2;
  double eq = INFINITY, diff = INFINITY;
  if (ok) {
    const double sigma = std::min(r.orbit_points[0], r.orbit_points[1]);
    eq = std::abs(2 * logit(sigma) - 10 * (sigma - 0.5));
    diff = std::abs(sigma - oracle::period2_point_symmetric(10));
    ok = eq < 1e-9 && diff <= 1e-6;
  }
  report(2, ok, "period-2 closed form at (10, 0.5)",
         "|2 logit - 10(s-1/2)| = " + fmt("%.2e", eq) + ", |s - oracle| = " + fmt("%.2e", diff) +
             fmt(", s = %.7f", std::min(r.orbit_points.empty() ? NAN : r.orbit_points[0],
                                        r.orbit_points.size() < 2 ? NAN : r.orbit_points[1])));
}

// 3, 4, 6 (part) -----------------------------------------------------------
const std::vector<std::pair<double, double>> kRegimePairs = {
    // stable
    {3, 0.5}, {6, 0.5}, {7.9, 0.5}, {9, 0.7}, {5, 0.3},
    // periodic
    {10, 0.5}, {20, 0.5}, {12, 0.7}, {25, 0.61}, {14, 0.6}, {100, 0.5}, {45, 0.8}, {35, 0.25},
    // chaotic
    {17, 0.3}, {40, 0.7}, {33.2, 0.61}, {60, 0.3}, {27, 0.75}, {25, 0.2}, {30, 0.4}};

double worst_identity = 0.0;  // criterion 6, accumulated over every orbit computed here

void note_identity(const Orbit& o, const LinearTwoParams& p) {
  const double q = p.b * (1 - p.b);
  worst_identity =
      std::max(worst_identity, std::abs(normalized_social_cost(o, p) - (1 + variance(o, p.b) / q)));
}

void cesaro_and_regret() {
  const auto t0 = Clock::now();
  double worst_mean = 0.0, worst_regret = 0.0;
  std::size_t chaotic = 0;
  for (auto [a, b] : kRegimePairs) {
    const LinearTwoParams p{a, b};
    const auto o = orbit_from_init(p, 20000, 1'000'000);
    worst_mean = std::max(worst_mean, std::abs(cesaro_average(o) - b));
    const double r = time_avg_regret(o, unit_economics(p));
    worst_regret = std::max(worst_regret, std::abs(r - a * variance(o, b)) / a);
    note_identity(o, p);
    if (detect_period(MapSpec{p}, initial_state({}, p)).aperiodic() &&
        lyapunov(MapSpec{p}, initial_state({}, p)) > 0)
      ++chaotic;
  }
  const double elapsed = seconds_since(t0);
  report(3, worst_mean <= 1e-4 && elapsed < 60.0 && chaotic >= 5,
         "Cesaro mean converges to b on 20 pairs",
         "max |mean - b| = " + fmt("%.2e", worst_mean) + ", chaotic pairs " +
             std::to_string(chaotic) + ", " + fmt("%.1f s", elapsed));
  report(4, worst_regret <= 1e-3, "time-average regret approaches N Var",
         "max |regret - N Var|/N = " + fmt("%.2e", worst_regret));
}

// 5 ------------------------------------------------------------------------
void regret_bound() {
  bool ok = true;
  std::size_t scanned = 0;
  double tightest = INFINITY;
  for (double b : {0.5, 0.61, 0.7}) {
    const double threshold = 1 / (b * (1 - b));
    for (int k = 0; k <= 208; ++k) {
      const double a = 2 + 0.25 * k;
      if (!(a > threshold)) continue;
      const LinearTwoParams p{a, b};
      const auto o = orbit_from_init(p, 10000, 100000);
      const double r = time_avg_regret(o, unit_economics(p));
      const double bound = regret_upper_bound(p, a);
      note_identity(o, p);
      tightest = std::min(tightest, bound - r);
      ok = ok && r <= bound;
      ++scanned;
    }
  }
  report(5, ok, "regret below N (y_max - b)(b - y_min)",
         std::to_string(scanned) + " values of a, min slack " + fmt("%.3g", tightest));
}

// 6 ------------------------------------------------------------------------
void social_cost_identity() {
  report(6, worst_identity <= 1e-10, "social cost equals 1 + Var/(b(1-b))",
         "max deviation " + fmt("%.2e", worst_identity) + " over the orbits of criteria 3-5");
}

// 7 ------------------------------------------------------------------------
void bifurcation_slope() {
  bool ok = true;
  std::string detail;
  for (auto [b, target] : {std::pair{0.5, 0.375}, {0.7, 0.178784}}) {
    const auto fit = fit_bifurcation_slopes(b);
    const double rel = std::abs(fit.sc_slope - target) / target;
    const double ratio = fit.regret_slope / fit.sc_slope;
    ok = ok && rel <= 0.05 && std::abs(ratio - 2) <= 0.05 * 2;
    detail += fmt("b=%.1f: ", b) + fmt("SC slope %.6f", fit.sc_slope) +
              fmt(" (target %.6f)", target) + fmt(", regret/SC %.4f; ", ratio);
  }
  detail.resize(detail.size() - 2);
  report(7, ok, "social cost and regret slopes past a*", detail);
}

// 8 ------------------------------------------------------------------------
void worst_case_social_cost() {
  std::vector<double> sc;
  for (double a : {10.0, 20.0, 50.0, 100.0}) {
    const LinearTwoParams p{a, 0.5};
    const auto o = orbit_from_init(p, 20000, 1'000'000);
    sc.push_back(normalized_social_cost(o, p));
  }
  const bool monotone = std::is_sorted(sc.begin(), sc.end());
  report(8, sc.back() >= 1.9 && monotone, "social cost approaches 2 at b = 1/2",
         fmt("SC(10)=%.6f", sc[0]) + fmt(" SC(20)=%.6f", sc[1]) + fmt(" SC(50)=%.6f", sc[2]) +
             fmt(" SC(100)=%.6f", sc[3]));
}

// 9 ------------------------------------------------------------------------
void feigenbaum() {
  const auto t0 = Clock::now();
  bool ok = false;
  std::string detail;
  try {
    const auto f = feigenbaum_cascade(15, 1, 12);
    const double d = f.delta_at(12), al = f.alpha_at(12);
    const double elapsed = seconds_since(t0);
    ok = std::abs(d - 4.669) <= 0.01 && std::abs(al + 2.502) <= 0.01 && elapsed < 600;
    detail = fmt("a=15: delta_12 = %.7f", d) + fmt(", alpha_12 = %.7f", al) +
             fmt(", %.1f s", elapsed);
  } catch (const std::exception& e) {
    detail = e.what();
  }
  report(9, ok, "Feigenbaum constants along a cascade in b", detail);
}

// 10 -----------------------------------------------------------------------
void chaos_certificate() {
  const auto hit = scan_period3([](double a) { return MapSpec{LinearTwoParams{a, 0.7}}; }, 4.5,
                                100, 955, 10000);
  const bool found = hit && hit->a <= 100 && oracle::period3_holds(hit->witness.x0, hit->a, 0.7);
  const bool none_at_8 = !find_period3_witness(MapSpec{LinearTwoParams{8, 0.5}}, 100000);
  std::string detail = found ? fmt("b=0.7: witness at a = %.2f", hit->a) +
                                   fmt(", x0 = %.6f", hit->witness.x0)
                             : std::string("b=0.7: no witness");
  detail += none_at_8 ? "; (8, 0.5): none on 1e5 grid" : "; (8, 0.5): unexpected witness";
  report(10, found && none_at_8, "period-3 certificate", detail);
}

// 11 -----------------------------------------------------------------------
void schwarzian_sign() {
  std::size_t samples = 0, positive = 0;
  double worst_rel = 0.0;
  const int per_combo = 834;  // 12 combinations, 10008 points
  for (double a : {4.5, 8.0, 20.0, 50.0}) {
    for (double b : {0.3, 0.5, 0.7}) {
      const LinearTwoParams p{a, b};
      for (int i = 1; i <= per_combo; ++i) {
        const double x = static_cast<double>(i) / (per_combo + 1);
        double s = 0.0;
        try {
          s = schwarzian(p, x);
        } catch (const std::exception&) {
          continue;  // exactly critical
        }
        ++samples;
        if (!(s < 0)) ++positive;
        // Sf has a double pole at each critical point and f has complex poles
        // within ~exp(-a min(b, 1-b)) of the ends, so the 50-digit stencil
        // uses 1e-6 and shrinks further next to a critical point.
        const auto cs = critical_structure(p);
        const double dist = std::min(std::abs(x - cs.x_l), std::abs(x - cs.x_r));
        const double fd = oracle::schwarzian_fd(x, a, b, std::min(1e-6, dist / 50));
        worst_rel = std::max(worst_rel, std::abs(s - fd) / std::abs(fd));
      }
    }
  }
  report(11, samples >= 10000 && positive == 0 && worst_rel <= 1e-4,
         "negative Schwarzian derivative",
         std::to_string(samples) + " points, " + std::to_string(positive) +
             " non-negative, max rel. deviation from finite differences " +
             fmt("%.2e", worst_rel));
}

// 12 -----------------------------------------------------------------------
void heterogeneous() {
  bool ok = true;
  std::string detail;
  for (const HeteroParams& p : {HeteroParams{20, 30, 0.8, 0.5, 0.5}, HeteroParams{10, 30, 0.7, 0.5, 0.5}}) {
    const auto drift = hetero_invariant_drift(p, 0.3, 0.6, 10000);
    const double x0[2] = {0.3, 0.6};
    const double mix = hetero_mixture_average(iterate(MapSpec{p}, x0, 0, 1'000'000), p);
    ok = ok && drift.cumulative <= 1e-9 && std::abs(mix - p.b) <= 1e-3;
    detail += fmt("(%g,", p.a1) + fmt("%g,", p.a2) + fmt("%g): ", p.b) +
              fmt("drift %.2e", drift.cumulative) + fmt(", |mix - b| %.2e; ", std::abs(mix - p.b));
  }
  detail.resize(detail.size() - 2);
  report(12, ok, "heterogeneous first integral and mixture average", detail);
}

// 13 -----------------------------------------------------------------------
void simplex() {
  const SimplexParams sp{{1, 2, 4}};
  const double x0[3] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const auto avg = simplex_cost_averages(iterate(MapSpec{sp}, x0, 0, 1'000'000), sp);
  const double target[3] = {4.0 / 7, 2.0 / 7, 1.0 / 7};
  double flow_err = 0.0;
  for (int i = 0; i < 3; ++i) flow_err = std::max(flow_err, std::abs(avg[i] - target[i]));

  // (6,6,12): the conjugate (15, 0.8) converges, so whole orbits are compared.
  // (10,10,20): the conjugate (25, 0.8) is chaotic, so the check is per step.
  double off_segment = 0.0, conj_err = 0.0;
  {
    const SimplexParams s{{6, 6, 12}};
    const auto lp = segment_conjugate(s, 2);
    auto state = embed_segment(0.3, s, 2);
    double y = 0.3;
    for (int n = 0; n < 1000; ++n) {
      state = step_simplex(state, s);
      y = step_linear2(y, lp);
      off_segment = std::max(off_segment, std::abs(state[0] - state[1]));
      conj_err = std::max(conj_err, std::abs(segment_coordinate(state, 2) - y));
    }
  }
  {
    const SimplexParams s{{10, 10, 20}};
    const auto lp = segment_conjugate(s, 2);
    auto state = embed_segment(0.3, s, 2);
    for (int n = 0; n < 1000; ++n) {
      const double y = step_linear2(segment_coordinate(state, 2), lp);
      state = step_simplex(state, s);
      off_segment = std::max(off_segment, std::abs(state[0] - state[1]));
      conj_err = std::max(conj_err, std::abs(segment_coordinate(state, 2) - y));
    }
  }
  report(13, flow_err <= 1e-3 && off_segment <= 1e-10 && conj_err <= 1e-10,
         "simplex time averages and segment conjugacy",
         "flow error " + fmt("%.2e", flow_err) + ", off-segment " + fmt("%.2e", off_segment) +
             ", conjugate error " + fmt("%.2e", conj_err));
}

// 14 -----------------------------------------------------------------------
void atomic() {
  const double eps = 1 - std::exp(-1.0);
  const auto p = reduce_atomic_two(1, 2, 11, eps);
  double xa = 0.3, xl = 0.3, worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    xa = step_atomic_two(xa, 1, 2, 11, eps);
    xl = step_linear2(xl, p);
    worst = std::max(worst, std::abs(xa - xl));
  }
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
  const auto costs = atomic_costs(x, 1.5, 7);
  std::vector<double> shifted = costs;
  for (double& c : shifted) c += 7 * 1.5;  // the constant alpha N that the reduction drops
  const auto u = mwu_update(x, costs, eps);
  const auto v = mwu_update(x, shifted, eps);
  const auto s = step_simplex(x, reduce_atomic_m(1.5, 7, eps, 4));
  double shift_err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    shift_err = std::max({shift_err, std::abs(u[i] - v[i]), std::abs(u[i] - s[i])});
  }
  report(14, worst <= 1e-12 && shift_err <= 1e-12, "atomic reductions",
         fmt("(a, b) = (%.12g, ", p.a) + fmt("%.12g)", p.b) + ", orbit gap " +
             fmt("%.2e", worst) + ", cost-shift gap " + fmt("%.2e", shift_err));
}

// 15 -----------------------------------------------------------------------
void polynomial() {
  double deg1 = 0.0;
  for (double a : {3.0, 17.0, 40.0}) {
    for (double b : {0.3, 0.5, 0.7}) {
      for (int i = 1; i <= 1000; ++i) {
        const double x = i / 1001.0;
        deg1 = std::max(deg1, std::abs(step_polynomial(x, {a, b, 1}) - step_linear2(x, {a, b})));
      }
    }
  }
  const PolynomialParams pp{40, 0.7, 2};
  const GameEconomics econ{0.3, 0.7, 1.0, 1 - std::exp(-1.0)};
  const double scale = (econ.alpha + econ.beta) * std::pow(econ.demand_N, pp.degree);
  const auto o = iterate(MapSpec{pp}, 0.3, 20000, 1'000'000);
  const double gap = std::abs(cost_gap_average(o, pp, econ)) / scale;
  const auto hit = scan_period3([](double a) { return MapSpec{PolynomialParams{a, 0.3, 2}}; },
                                4.5, 200, 3910, 10000);
  const bool witness = hit && oracle::period3_holds_poly(hit->witness.x0, hit->a, 0.3, 2);
  report(15, deg1 <= 1e-15 && gap <= 1e-3 && witness, "polynomial costs",
         "degree-1 gap " + fmt("%.2e", deg1) + ", |cost gap|/scale " + fmt("%.2e", gap) +
             (witness ? fmt(", p=2 witness at a = %.2f", hit->a) : ", no p=2 witness"));
}

// 16 -----------------------------------------------------------------------
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "mwu_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::vector<std::string>> commands = {
      {"simulate", "--a", "40", "--b", "0.7", "--T", "20000"},
      {"bifurcation", "--b", "0.5", "--a-range", "2:16:60", "--samples", "20"},
      {"diagram", "--a-range", "2:54:40", "--b-range", "0.02:0.98:30", "--transient", "5000"},
      {"lyapunov", "--a-range", "2:54:40", "--b-range", "0.02:0.98:30", "--transient", "5000"},
      {"metrics", "--b", "0.7", "--a-range", "2:30:15", "--transient", "5000", "--T", "20000"},
      {"feigenbaum", "--a", "15", "--n-max", "6"},
      {"chaos-cert", "--a", "40", "--b", "0.7", "--grid", "10000", "--init-grid", "40"},
      {"hetero", "--T", "20000"},
      {"simplex", "--rates", "1,2,4", "--T", "20000"},
      {"atomic", "--alpha1", "1", "--alpha2", "2", "--N", "11", "simulate", "--T", "20000"}};
  const std::set<std::string> threaded = {"bifurcation", "diagram", "lyapunov", "metrics"};
  const std::set<std::string> grid = {"diagram", "lyapunov"};
  bool ok = true;
  std::string mismatched;
  for (const auto& cmd : commands) {
    std::vector<std::string> outputs;
    const std::vector<std::string> thread_counts =
        threaded.count(cmd[0]) ? std::vector<std::string>{"1", "1", "4"}
                               : std::vector<std::string>{"", ""};
    for (std::size_t run = 0; run < thread_counts.size(); ++run) {
      auto args = cmd;
      const std::string stem = (dir / (cmd[0] + std::to_string(run))).string();
      if (!thread_counts[run].empty()) args.insert(args.end(), {"--threads", thread_counts[run]});
      if (grid.count(cmd[0])) {
        args.insert(args.end(), {"--csv", stem + ".csv", "--ppm", stem + ".ppm"});
      } else {
        args.insert(args.end(), {"--out", stem + ".csv"});
      }
      std::ostringstream out, err;
      if (run_cli(args, out, err) != kExitOk) {
        ok = false;
        mismatched += cmd[0] + "(exit) ";
        break;
      }
      std::string bytes = slurp(stem + ".csv");
      if (grid.count(cmd[0])) bytes += slurp(stem + ".ppm");
      outputs.push_back(bytes);
    }
    for (const auto& o : outputs) {
      if (o != outputs.front() || o.empty()) {
        ok = false;
        mismatched += cmd[0] + " ";
        break;
      }
    }
  }
  std::filesystem::remove_all(dir);
  report(16, ok, "byte-identical reruns across worker counts",
         ok ? std::to_string(commands.size()) + " subcommands" : "differs: " + mismatched);
}

// structural checks on the full-resolution figures ---------------------------
void structural() {
  // The 2-cycle at b = 1/2 has multiplier ~0.9998 near a = 54, so 2e4
  // transient steps leave residuals just above 1e-10 there; the row uses 1e5.
  SweepGrid g;
  g.a = {2, 54, 800};
  g.b = {0.5, 0.5, 1};
  g.period.transient = 100000;
  const auto row = period_diagram(g);
  std::set<int> codes;
  bool split = true;
  for (std::size_t c = 0; c < row.cols; ++c) {
    const auto& cell = row.at(0, c);
    codes.insert(cell.period_code);
    split = split && cell.period_code == (cell.a < 8 ? 1 : 2);
  }
  g.period.transient = 20000;
  std::size_t unresolved = 0;
  for (const auto& cell : period_diagram(g).cells) unresolved += cell.period_code == 0;
  report_structural("S1", codes.size() == 2 && split, "b = 1/2 row holds two codes split at a = 8",
                    std::to_string(row.cols) + " cells, " + std::to_string(codes.size()) +
                        " codes at transient 1e5; " + std::to_string(unresolved) +
                        " cells unresolved at transient 2e4");

  std::vector<std::pair<double, double>> found;
  for (int k = 43; k <= 51 && found.empty(); ++k) {
    const double b = k / 80.0;
    const auto hits = scan_coexistence(b, 4.05, 54, 999);
    if (!hits.empty()) found.emplace_back(b, hits.front());
  }
  report_structural("S2", !found.empty(), "coexisting attractors for b in [43/80, 51/80]",
                    found.empty() ? std::string("none")
                                  : fmt("first at b = %.4f", found[0].first) +
                                        fmt(", a = %.2f", found[0].second));
}

}  // namespace

int main() {
  symmetric_threshold();
  period_two_closed_form();
  cesaro_and_regret();
  regret_bound();
  social_cost_identity();
  bifurcation_slope();
  worst_case_social_cost();
  feigenbaum();
  chaos_certificate();
  schwarzian_sign();
  heterogeneous();
  simplex();
  atomic();
  polynomial();
  determinism();
  structural();
  std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}

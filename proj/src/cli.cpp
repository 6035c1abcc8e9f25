#include "mwu/cli.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mwu/chaos.hpp"
#include "mwu/dynamics.hpp"
#include "mwu/errors.hpp"
#include "mwu/metrics.hpp"
#include "mwu/orbit.hpp"
#include "mwu/sweep.hpp"

namespace mwu {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

void deliver(const CsvTable& t, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    emit_csv(t, out);
  } else {
    write_csv(t, path);
  }
}

InitSpec parse_init(const std::string& text) {
  if (text == "x_l") return {InitRule::left_critical, 0.5};
  if (text == "x_r") return {InitRule::right_critical, 0.5};
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') throw UsageError("--init takes x_l, x_r or a number in (0,1)");
  return {InitRule::fixed, v};
}

// ---- scalar game parameters ------------------------------------------

struct ParamOpts {
  std::optional<double> a, b, alpha, beta, N, eps;
};

void add_params(CLI::App* app, ParamOpts& o) {
  app->add_option("--a", o.a, "Normalized demand a (with --b)");
  app->add_option("--b", o.b, "Equilibrium split b in (0,1) (with --a)");
  app->add_option("--alpha", o.alpha, "Cost slope of path 1 (raw economics)");
  app->add_option("--beta", o.beta, "Cost slope of path 2 (raw economics)");
  app->add_option("--N", o.N, "Total demand (raw economics)");
  app->add_option("--eps", o.eps, "Learning rate in (0,1) (raw economics)");
}

struct Game {
  LinearTwoParams p;
  GameEconomics econ;
};

Game resolve(const ParamOpts& o) {
  const bool normalized = o.a || o.b;
  const bool raw = o.alpha || o.beta || o.N || o.eps;
  if (normalized && raw) {
    throw UsageError("give either --a/--b or --alpha/--beta/--N/--eps, not both");
  }
  if (normalized) {
    if (!(o.a && o.b)) throw UsageError("--a and --b must be given together");
    Game g;
    g.p = {*o.a, *o.b};
    g.p.validate();
    g.econ = unit_economics(g.p);
    return g;
  }
  if (raw) {
    if (!(o.alpha && o.beta && o.N && o.eps)) {
      throw UsageError("raw economics need all of --alpha, --beta, --N, --eps");
    }
    Game g;
    g.econ = {*o.alpha, *o.beta, *o.N, *o.eps};
    g.p = normalize_economics(g.econ);
    return g;
  }
  throw UsageError("missing game parameters: --a/--b or --alpha/--beta/--N/--eps");
}

// ---- simulate --------------------------------------------------------

struct SimulateOpts {
  ParamOpts params;
  int degree = 1;
  std::optional<double> x0;
  std::size_t transient = 20000;
  std::size_t T = 100000;
  std::string out;
  std::string orbit_out;
  std::string cobweb_out;
  std::size_t cobweb_steps = 50;
};

void add_simulate_opts(CLI::App* sub, SimulateOpts& o) {
  sub->add_option("--degree", o.degree, "Cost polynomial degree p (1 = linear costs)");
  sub->add_option("--x0", o.x0, "Initial flow on path 1 (default: left critical point)");
  sub->add_option("--transient", o.transient, "Discarded iterations");
  sub->add_option("--T", o.T, "Recorded iterations");
  sub->add_option("--out", o.out, "Report CSV (default stdout)");
  sub->add_option("--orbit-out", o.orbit_out, "Optional CSV of the recorded orbit");
  sub->add_option("--cobweb-out", o.cobweb_out, "Optional CSV of a cobweb trace from x0");
  sub->add_option("--cobweb-steps", o.cobweb_steps, "Segments in the cobweb trace");
}

double default_start(const LinearTwoParams& p) { return initial_state({}, p); }

void run_simulate(const Game& g, const SimulateOpts& o, std::ostream& out) {
  if (o.degree < 1) throw UsageError("--degree must be >= 1");
  const double x0 = o.x0 ? *o.x0 : default_start(g.p);
  CsvTable t;
  MapSpec map{g.p};
  if (o.degree == 1) {
    const auto orbit = iterate(map, x0, o.transient, o.T);
    const auto report = metrics_report(orbit, g.econ);
    PeriodOptions po;
    po.transient = o.transient;
    const auto period = detect_period(map, x0, po);
    t.header = {"a",        "b",          "N",          "x0",           "transient",
                "T",        "mean",       "variance",   "regret_avg",   "regret_bound",
                "norm_sc",  "period",     "saturated"};
    t.rows.push_back({g.p.a, g.p.b, g.econ.demand_N, x0, static_cast<double>(o.transient),
                      static_cast<double>(o.T), report.cesaro_mean, report.variance,
                      report.regret_avg, report.regret_bound, report.norm_social_cost,
                      period.period ? static_cast<double>(*period.period) : 0.0,
                      orbit.saturated ? 1.0 : 0.0});
    if (!o.orbit_out.empty()) {
      CsvTable ot;
      ot.header = {"n", "x"};
      for (std::size_t n = 0; n < orbit.size(); ++n) {
        ot.rows.push_back({static_cast<double>(n + o.transient), orbit.scalar(n)});
      }
      write_csv(ot, o.orbit_out);
    }
  } else {
    const PolynomialParams pp{g.p.a, g.p.b, o.degree};
    map = MapSpec{pp};
    const auto orbit = iterate(map, x0, o.transient, o.T);
    t.header = {"a", "b", "degree", "N", "x0", "transient", "T", "mean", "equilibrium",
                "cost_gap", "saturated"};
    t.rows.push_back({pp.a, pp.b, static_cast<double>(pp.degree), g.econ.demand_N, x0,
                      static_cast<double>(o.transient), static_cast<double>(o.T),
                      cesaro_average(orbit), polynomial_equilibrium(pp),
                      cost_gap_average(orbit, pp, g.econ), orbit.saturated ? 1.0 : 0.0});
  }
  if (!o.cobweb_out.empty()) {
    CsvTable ct;
    ct.header = {"from", "to", "potential_from", "potential_to"};
    for (const auto& s : cobweb_trace(map, x0, o.cobweb_steps)) {
      ct.rows.push_back({s.from, s.to, s.potential_from, s.potential_to});
    }
    write_csv(ct, o.cobweb_out);
  }
  deliver(t, o.out, out);
}

// ---- bifurcation -----------------------------------------------------

struct BifurcationOpts {
  double b = 0.5;
  std::string a_range = "2:16";
  std::size_t steps = 400;
  std::string init = "x_l";
  std::size_t transient = 20000;
  std::size_t samples = 100;
  std::size_t threads = 0;
  std::string out;
};

void run_bifurcation(const BifurcationOpts& o, std::ostream& out) {
  const auto range = parse_range(o.a_range, o.steps);
  auto t = to_table(bifurcation_scan(o.b, range, parse_init(o.init), o.transient, o.samples,
                                     o.threads));
  t.comments = {fmt::format("b={} init={} transient={} samples={}", format_number(o.b), o.init,
                            o.transient, o.samples)};
  deliver(t, o.out, out);
}

// ---- diagram / lyapunov ----------------------------------------------

struct GridOpts {
  std::string a_range = "2:54";
  std::string b_range = "0.02:0.98";
  std::size_t res = 800;
  std::size_t transient = 20000;
  double tol = 1e-10;
  std::size_t max_period = 8;
  std::size_t T = 2000;
  std::string init = "x_l";
  bool adaptive = false;
  std::size_t threads = 0;
  std::string csv;
  std::string ppm;
  bool resume = false;
};

void add_grid_opts(CLI::App* sub, GridOpts& o, bool lyapunov) {
  sub->add_option("--a-range", o.a_range, "a range lo:hi[:steps]");
  sub->add_option("--b-range", o.b_range, "b range lo:hi[:steps]");
  sub->add_option("--res", o.res, "Steps per axis when a range gives none");
  sub->add_option("--transient", o.transient, "Discarded iterations per cell");
  sub->add_option("--tol", o.tol, "Absolute closure tolerance |f^n(x)-x|");
  sub->add_option("--max-period", o.max_period, "Largest period tested");
  if (lyapunov) sub->add_option("--T", o.T, "Iterations averaged for the Lyapunov exponent");
  sub->add_option("--init", o.init, "Start: x_l, x_r or a value in (0,1)");
  sub->add_flag("--adaptive", o.adaptive, "Stop the transient once the orbit repeats exactly");
  sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  sub->add_option("--csv", o.csv, "Grid CSV (a,b,period_code,lyapunov)");
  sub->add_option("--ppm", o.ppm, "Binary PPM image");
  sub->add_flag("--resume", o.resume, "Continue a partially written --csv");
}

void run_grid(const GridOpts& o, CellContent content, Palette palette, std::ostream& out) {
  SweepGrid grid;
  grid.a = parse_range(o.a_range, o.res);
  grid.b = parse_range(o.b_range, o.res);
  grid.period.transient = o.transient;
  grid.period.tol = o.tol;
  grid.period.max_period = o.max_period;
  grid.period.adaptive = o.adaptive;
  grid.lyapunov_T = o.T;
  grid.init = parse_init(o.init);
  grid.threads = o.threads;
  grid.validate();
  if (o.resume && o.csv.empty()) throw UsageError("--resume needs --csv");

  CellMatrix m;
  if (!o.csv.empty()) {
    stream_grid_csv(grid, content, o.csv, o.resume);
    m = matrix_from_table(read_csv(o.csv), grid.a.steps);
  } else {
    m = sweep(grid, content);
    if (o.ppm.empty()) {
      auto t = to_table(m);
      t.comments = grid_metadata(grid, content);
      emit_csv(t, out);
    }
  }
  if (!o.ppm.empty()) write_ppm(m, palette, o.ppm);
}

// ---- metrics ---------------------------------------------------------

struct MetricsOpts {
  double b = 0.7;
  std::string a_range = "2:30";
  std::size_t steps = 141;
  std::string init = "x_l";
  std::size_t transient = 100000;
  std::size_t T = 1000000;
  std::size_t threads = 0;
  std::string out;
};

void run_metrics(const MetricsOpts& o, std::ostream& out) {
  const auto range = parse_range(o.a_range, o.steps);
  auto t = to_table(metrics_curve(o.b, range, parse_init(o.init), o.transient, o.T, o.threads));
  t.comments = {fmt::format("b={} N=a alpha=1-b beta=b eps=1-1/e init={} transient={} T={}",
                            format_number(o.b), o.init, o.transient, o.T),
                fmt::format("carrying_capacity={}", format_number(carrying_capacity(o.b)))};
  deliver(t, o.out, out);
}

// ---- feigenbaum ------------------------------------------------------

struct FeigenbaumOpts {
  double a = 15.0;
  int direction = 1;
  std::size_t n_max = 12;
  std::string side = "left";
  std::string out;
};

void run_feigenbaum(const FeigenbaumOpts& o, std::ostream& out) {
  if (o.side != "left" && o.side != "right") throw UsageError("--side takes left or right");
  const auto est = feigenbaum_cascade(o.a, o.direction, o.n_max, o.side == "left");
  CsvTable t;
  t.comments = {fmt::format("a={} side={} direction={} n_max={}", format_number(o.a), o.side,
                            o.direction, o.n_max)};
  t.header = {"n", "b_n", "residual", "d_n", "delta_n", "alpha_n"};
  for (std::size_t n = 0; n < est.parameters.size(); ++n) {
    const double d = n >= 1 ? est.distances[n - 1] : kNaN;
    const double delta = n >= 1 && n <= est.delta.size() ? est.delta[n - 1] : kNaN;
    const double alpha = n >= 1 && n <= est.alpha.size() ? est.alpha[n - 1] : kNaN;
    t.rows.push_back(
        {static_cast<double>(n), est.parameters[n], est.residuals[n], d, delta, alpha});
  }
  deliver(t, o.out, out);
}

// ---- chaos-cert ------------------------------------------------------

struct ChaosOpts {
  ParamOpts params;
  int degree = 1;
  std::size_t grid = 100000;
  std::string scan;
  std::size_t scan_steps = 200;
  EntropyOptions entropy{};
  std::string out;
};

void add_chaos_opts(CLI::App* sub, ChaosOpts& o) {
  sub->add_option("--degree", o.degree, "Cost polynomial degree p (1 = linear costs)");
  sub->add_option("--grid", o.grid, "Witness grid x0 = i/grid");
  sub->add_option("--word-length", o.entropy.word_length, "Longest symbolic word");
  sub->add_option("--init-grid", o.entropy.init_grid, "Starts for the word count");
  sub->add_option("--entropy-transient", o.entropy.transient, "Discarded iterations per start");
  sub->add_option("--orbit-length", o.entropy.orbit_length, "Symbols recorded per start");
  sub->add_option("--out", o.out, "CSV output (default stdout)");
}

std::vector<double> chaos_row(const LinearTwoParams& p, int degree, const ChaosOpts& o,
                              const std::optional<Period3Witness>& w) {
  double entropy = kNaN;
  double lyap = kNaN;
  if (degree == 1 && p.a > 4.0) {
    entropy = estimate_entropy(p, o.entropy).rate;
    lyap = lyapunov(MapSpec{p}, critical_structure(p).x_l);
  }
  return {p.a,
          p.b,
          static_cast<double>(degree),
          w ? 1.0 : 0.0,
          w ? w->x0 : kNaN,
          w ? w->x1 : kNaN,
          w ? w->x3 : kNaN,
          entropy,
          lyap};
}

MapSpec scalar_map(double a, double b, int degree) {
  if (degree == 1) return MapSpec{LinearTwoParams{a, b}};
  return MapSpec{PolynomialParams{a, b, degree}};
}

void run_chaos(const std::optional<Game>& preset, const ChaosOpts& o, std::ostream& out) {
  if (o.degree < 1) throw UsageError("--degree must be >= 1");
  CsvTable t;
  t.header = {"a", "b", "degree", "witness", "x0", "x1", "x3", "entropy", "lyapunov"};
  t.comments = {fmt::format("grid={} word_length={} init_grid={}", o.grid,
                            o.entropy.word_length, o.entropy.init_grid)};
  if (!o.scan.empty()) {
    if (preset || o.params.a || !o.params.b) throw UsageError("--scan needs --b and no --a");
    const double b = *o.params.b;
    const auto range = parse_range(o.scan, o.scan_steps);
    const auto hit = scan_period3(
        [&](double a) { return scalar_map(a, b, o.degree); }, range.min, range.max,
        std::max<std::size_t>(range.steps, 2) - 1, o.grid);
    if (hit) {
      t.rows.push_back(chaos_row({hit->a, b}, o.degree, o, hit->witness));
    } else {
      t.rows.push_back({kNaN, b, static_cast<double>(o.degree), 0.0, kNaN, kNaN, kNaN, kNaN,
                        kNaN});
    }
  } else {
    const Game g = preset ? *preset : resolve(o.params);
    const auto w = find_period3_witness(scalar_map(g.p.a, g.p.b, o.degree), o.grid);
    t.rows.push_back(chaos_row(g.p, o.degree, o, w));
  }
  deliver(t, o.out, out);
}

// ---- hetero ----------------------------------------------------------

struct HeteroOpts {
  double a1 = 20.0;
  double a2 = 30.0;
  double b = 0.8;
  double eta1 = 0.5;
  double x0 = 0.3;
  double y0 = 0.6;
  std::size_t transient = 0;
  std::size_t T = 1000000;
  std::size_t drift_steps = 10000;
  std::string out;
};

void run_hetero(const HeteroOpts& o, std::ostream& out) {
  const HeteroParams p{o.a1, o.a2, o.b, o.eta1, 1.0 - o.eta1};
  p.validate();
  const double start[2] = {o.x0, o.y0};
  const auto orbit = iterate(MapSpec{p}, start, o.transient, o.T);
  const auto drift = hetero_invariant_drift(p, o.x0, o.y0, o.drift_steps);
  CsvTable t;
  t.header = {"a1", "a2", "b", "eta1", "x0", "y0", "T", "mixture_avg", "log_I0",
              "drift_max_step", "drift_cumulative"};
  t.rows.push_back({p.a1, p.a2, p.b, p.eta1, o.x0, o.y0, static_cast<double>(o.T),
                    hetero_mixture_average(orbit, p), drift.initial, drift.max_step,
                    drift.cumulative});
  deliver(t, o.out, out);
}

// ---- simplex ---------------------------------------------------------

struct SimplexOpts {
  std::vector<double> rates{1.0, 2.0, 4.0};
  std::vector<double> x0;
  std::size_t transient = 0;
  std::size_t T = 1000000;
  std::string out;
};

void add_simplex_opts(CLI::App* sub, SimplexOpts& o, bool with_rates) {
  if (with_rates) {
    sub->add_option("--rates", o.rates, "Per-path rates a_i")->delimiter(',');
  }
  sub->add_option("--x0", o.x0, "Initial flow (default uniform)")->delimiter(',');
  sub->add_option("--transient", o.transient, "Discarded iterations");
  sub->add_option("--T", o.T, "Recorded iterations");
  sub->add_option("--out", o.out, "CSV output (default stdout)");
}

void run_simplex(const SimplexParams& p, const SimplexOpts& o, std::ostream& out) {
  p.validate();
  std::vector<double> x0 = o.x0;
  if (x0.empty()) x0.assign(p.size(), 1.0 / static_cast<double>(p.size()));
  const auto orbit = iterate(MapSpec{p}, x0, o.transient, o.T);
  const auto avg = simplex_cost_averages(orbit, p);
  const auto eq = simplex_equilibrium(p.rates);
  CsvTable t;
  t.comments = {fmt::format("T={} transient={}", o.T, o.transient)};
  t.header = {"path", "rate", "x0", "average", "equilibrium"};
  for (std::size_t i = 0; i < p.size(); ++i) {
    t.rows.push_back({static_cast<double>(i + 1), p.rates[i], x0[i], avg[i], eq[i]});
  }
  deliver(t, o.out, out);
}

// ---- atomic ----------------------------------------------------------

struct AtomicOpts {
  std::optional<double> alpha1, alpha2, alpha;
  std::optional<int> N, m;
  double eps = 1.0 - std::exp(-1.0);
  std::string out;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MWU congestion-game dynamics lab"};
  app.name("mwu-lab");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Orbit of one game and its metrics report");
  add_params(sim_cmd, sim.params);
  add_simulate_opts(sim_cmd, sim);

  BifurcationOpts bif;
  auto* bif_cmd = app.add_subcommand("bifurcation", "Post-transient samples across a at fixed b");
  bif_cmd->add_option("--b", bif.b, "Equilibrium split b");
  bif_cmd->add_option("--a-range", bif.a_range, "a range lo:hi[:steps]");
  bif_cmd->add_option("--steps", bif.steps, "a steps when --a-range gives none");
  bif_cmd->add_option("--init", bif.init, "Start: x_l, x_r or a value in (0,1)");
  bif_cmd->add_option("--transient", bif.transient, "Discarded iterations");
  bif_cmd->add_option("--samples", bif.samples, "Recorded iterations per a");
  bif_cmd->add_option("--threads", bif.threads, "Worker threads (0 = all cores)");
  bif_cmd->add_option("--out", bif.out, "CSV output (default stdout)");

  GridOpts diag;
  auto* diag_cmd = app.add_subcommand("diagram", "Period diagram over (a, b)");
  add_grid_opts(diag_cmd, diag, false);

  GridOpts lyap;
  auto* lyap_cmd = app.add_subcommand("lyapunov", "Lyapunov heatmap over (a, b)");
  add_grid_opts(lyap_cmd, lyap, true);

  MetricsOpts met;
  auto* met_cmd = app.add_subcommand("metrics", "Mean, variance, regret and social cost against a");
  met_cmd->add_option("--b", met.b, "Equilibrium split b");
  met_cmd->add_option("--a-range", met.a_range, "a range lo:hi[:steps]");
  met_cmd->add_option("--steps", met.steps, "a steps when --a-range gives none");
  met_cmd->add_option("--init", met.init, "Start: x_l, x_r or a value in (0,1)");
  met_cmd->add_option("--transient", met.transient, "Discarded iterations");
  met_cmd->add_option("--T", met.T, "Recorded iterations per a");
  met_cmd->add_option("--threads", met.threads, "Worker threads (0 = all cores)");
  met_cmd->add_option("--out", met.out, "CSV output (default stdout)");

  FeigenbaumOpts fg;
  auto* fg_cmd = app.add_subcommand("feigenbaum", "Period-doubling cascade along b at fixed a");
  fg_cmd->add_option("--a", fg.a, "Fixed a (> 4)");
  fg_cmd->add_option("--direction", fg.direction, "Walk b upward (1) or downward (-1)")
      ->check(CLI::IsMember({-1, 1}));
  fg_cmd->add_option("--n-max", fg.n_max, "Last level n with delta_n and alpha_n");
  fg_cmd->add_option("--side", fg.side, "Critical point followed: left or right");
  fg_cmd->add_option("--out", fg.out, "CSV output (default stdout)");

  ChaosOpts chaos;
  auto* chaos_cmd = app.add_subcommand("chaos-cert", "Period-3 witness and symbolic entropy");
  add_params(chaos_cmd, chaos.params);
  add_chaos_opts(chaos_cmd, chaos);
  chaos_cmd->add_option("--scan", chaos.scan, "Search a over lo:hi[:steps] at the given --b");
  chaos_cmd->add_option("--scan-steps", chaos.scan_steps, "a steps when --scan gives none");

  HeteroOpts het;
  auto* het_cmd = app.add_subcommand("hetero", "Two-population orbit, first integral drift");
  het_cmd->add_option("--a1", het.a1, "Rate of population 1");
  het_cmd->add_option("--a2", het.a2, "Rate of population 2");
  het_cmd->add_option("--b", het.b, "Equilibrium split b");
  het_cmd->add_option("--eta1", het.eta1, "Share of population 1 (eta2 = 1 - eta1)");
  het_cmd->add_option("--x0", het.x0, "Initial flow of population 1");
  het_cmd->add_option("--y0", het.y0, "Initial flow of population 2");
  het_cmd->add_option("--transient", het.transient, "Discarded iterations");
  het_cmd->add_option("--T", het.T, "Recorded iterations");
  het_cmd->add_option("--drift-steps", het.drift_steps, "Steps for the invariant drift check");
  het_cmd->add_option("--out", het.out, "CSV output (default stdout)");

  SimplexOpts spx;
  auto* spx_cmd = app.add_subcommand("simplex", "m-path orbit and time-average flows");
  add_simplex_opts(spx_cmd, spx, true);

  AtomicOpts at;
  auto* at_cmd = app.add_subcommand(
      "atomic", "Reduce an atomic game, then optionally run simulate, chaos-cert or simplex");
  at_cmd->add_option("--alpha1", at.alpha1, "Two paths: cost slope of path 1");
  at_cmd->add_option("--alpha2", at.alpha2, "Two paths: cost slope of path 2");
  at_cmd->add_option("--alpha", at.alpha, "m identical paths: common cost slope");
  at_cmd->add_option("--m", at.m, "m identical paths: number of paths");
  at_cmd->add_option("--N", at.N, "Number of agents (>= 2)");
  at_cmd->add_option("--eps", at.eps, "Learning rate in (0,1)");
  at_cmd->add_option("--out", at.out, "Reduction CSV when no follow-up command is given");
  at_cmd->require_subcommand(0, 1);
  SimulateOpts at_sim;
  auto* at_sim_cmd = at_cmd->add_subcommand("simulate", "simulate the reduced two-path game");
  add_simulate_opts(at_sim_cmd, at_sim);
  ChaosOpts at_chaos;
  auto* at_chaos_cmd = at_cmd->add_subcommand("chaos-cert", "chaos-cert the reduced game");
  add_chaos_opts(at_chaos_cmd, at_chaos);
  SimplexOpts at_spx;
  auto* at_spx_cmd = at_cmd->add_subcommand("simplex", "simplex run of the reduced m-path game");
  add_simplex_opts(at_spx_cmd, at_spx, false);

  std::vector<std::string> argv_store{"mwu-lab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      app.exit(e, out, err);
      return kExitUsage;
    }

    if (*sim_cmd) {
      run_simulate(resolve(sim.params), sim, out);
    } else if (*bif_cmd) {
      run_bifurcation(bif, out);
    } else if (*diag_cmd) {
      run_grid(diag, CellContent::period, Palette::period, out);
    } else if (*lyap_cmd) {
      run_grid(lyap, CellContent::both, Palette::lyapunov, out);
    } else if (*met_cmd) {
      run_metrics(met, out);
    } else if (*fg_cmd) {
      run_feigenbaum(fg, out);
    } else if (*chaos_cmd) {
      run_chaos(std::nullopt, chaos, out);
    } else if (*het_cmd) {
      run_hetero(het, out);
    } else if (*spx_cmd) {
      run_simplex(SimplexParams{spx.rates}, spx, out);
    } else if (*at_cmd) {
      if (!at.N) throw UsageError("atomic needs --N");
      const bool two = at.alpha1 || at.alpha2;
      const bool many = at.alpha || at.m;
      if (two == many) throw UsageError("atomic needs --alpha1/--alpha2 or --alpha/--m");
      if (two) {
        if (!(at.alpha1 && at.alpha2)) throw UsageError("--alpha1 and --alpha2 go together");
        if (*at_spx_cmd) throw UsageError("simplex follows an --alpha/--m reduction");
        Game g;
        g.p = reduce_atomic_two(*at.alpha1, *at.alpha2, *at.N, at.eps);
        g.econ = unit_economics(g.p);
        if (*at_sim_cmd) {
          run_simulate(g, at_sim, out);
        } else if (*at_chaos_cmd) {
          run_chaos(g, at_chaos, out);
        } else {
          CsvTable t;
          t.header = {"alpha1", "alpha2", "N", "eps", "a", "b"};
          t.rows.push_back(
              {*at.alpha1, *at.alpha2, static_cast<double>(*at.N), at.eps, g.p.a, g.p.b});
          deliver(t, at.out, out);
        }
      } else {
        if (!(at.alpha && at.m)) throw UsageError("--alpha and --m go together");
        if (*at_sim_cmd || *at_chaos_cmd) {
          throw UsageError("simulate and chaos-cert follow an --alpha1/--alpha2 reduction");
        }
        const auto p = reduce_atomic_m(*at.alpha, *at.N, at.eps, *at.m);
        if (*at_spx_cmd) {
          run_simplex(p, at_spx, out);
        } else {
          CsvTable t;
          t.header = {"alpha", "N", "eps", "m", "rate"};
          t.rows.push_back({*at.alpha, static_cast<double>(*at.N), at.eps,
                            static_cast<double>(*at.m), p.rates.front()});
          deliver(t, at.out, out);
        }
      }
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitPrecondition;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace mwu

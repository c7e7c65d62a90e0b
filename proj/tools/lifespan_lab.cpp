// lifespan_lab: command-line front end for the life-span toolkit.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "lifespan/config.hpp"
#include "lifespan/csv.hpp"
#include "lifespan/error.hpp"
#include "lifespan/experiments.hpp"
#include "lifespan/property_suites.hpp"
#include "plot.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace lifespan;

namespace {

struct Globals {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<double> eps;
  bool quiet = false;
};

json num(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

RunConfig resolve(const Globals& g) {
  RunConfig c = g.config_path.empty() ? RunConfig{} : load_run_config(g.config_path);
  if (!g.out_dir.empty()) c.output_dir = g.out_dir;
  if (g.seed) c.seed = *g.seed;
  return c;
}

fs::path out_file(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.output_dir);
  return fs::path(c.output_dir) / name;
}

void emit(const Globals& g, const json& j) {
  if (!g.quiet) std::cout << j.dump(2) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  os << text;
}

json record_json(const LifespanRecord& r) {
  return {{"eps", r.eps},          {"T_num", num(r.T_num)},     {"scaled", num(r.scaled)},
          {"bound_const", num(r.bound_const)}, {"ratio", num(r.ratio)}, {"status", r.status},
          {"termination", r.termination}, {"L", r.L},            {"N", r.N},
          {"diagnostic", r.diagnostic}};
}

json check_json(const BoundCheck& c) {
  return {{"name", c.name},
          {"samples", c.samples},
          {"fitted_constant", c.fitted_constant},
          {"max_ratio", c.max_ratio},
          {"violations", c.violations},
          {"passed", c.passed}};
}

int cmd_bound(const Globals& g, std::optional<double> p, std::vector<double> lambda, std::optional<double> sup) {
  RunConfig c = resolve(g);
  const double pp = p.value_or(c.model.p);
  const cplx lam = lambda.size() == 2 ? cplx(lambda[0], lambda[1]) : c.model.lambda;
  const double s = sup ? *sup : c.model.profile.hat_sup();
  const double eps = g.eps.empty() ? c.model.epsilon : g.eps.front();
  const double A = blowup_constant_A(pp, lam, s);
  const double B = c.model.B ? *c.model.B : c.model.B_over_A * A;
  const TheoreticalBound b = theoretical_bound(pp, lam, s, eps, B);
  std::cout << "A=" << format_double(b.A) << '\n';
  if (b.liminf_const) std::cout << "liminf_const=" << format_double(*b.liminf_const) << '\n';
  if (b.T_B) std::cout << "T_B=" << format_double(*b.T_B) << " (eps=" << format_double(eps) << ", B=" << format_double(B) << ")\n";
  if (b.p3_log_bound) std::cout << "p3_log_bound=" << format_double(*b.p3_log_bound) << '\n';
  return 0;
}

int cmd_simulate(const Globals& g, std::optional<double> t_end) {
  RunConfig c = resolve(g);
  if (!g.eps.empty()) c.model.epsilon = g.eps.front();
  SolverKnobs knobs = c.solver;
  knobs.t_end = t_end.value_or(c.t_end);
  SolverConfig cfg = lifespan_config(c.model, knobs);
  cfg.record_times = c.record_times.empty() ? lin_spaced(0.0, cfg.t_end, 21) : c.record_times;
  cfg.keep_fields = false;
  const Trajectory traj = evolve(cfg);
  const fs::path path = out_file(c, "trajectory.csv");
  std::ofstream os(path);
  write_csv_row(os, {"t", "l2", "l_inf", "h1", "x_norm", "l2_part", "dx_part", "j_part", "mass", "power_integral"});
  for (const auto& r : traj.records) {
    write_csv_row(os, {format_double(r.t), format_double(r.norms.l2), format_double(r.norms.l_inf),
                       format_double(r.norms.h1), format_double(r.norms.x_norm), format_double(r.norms.l2_part),
                       format_double(r.norms.dx_part), format_double(r.norms.j_part), format_double(r.mass),
                       format_double(r.power_integral)});
  }
  emit(g, {{"termination", to_string(traj.termination)},
           {"t_final", traj.t_final},
           {"steps", traj.steps},
           {"rejected_steps", traj.rejected_steps},
           {"L", cfg.grid.half_width()},
           {"N", cfg.grid.size()},
           {"csv", path.string()}});
  return 0;
}

int cmd_lifespan(const Globals& g) {
  RunConfig c = resolve(g);
  if (!g.eps.empty()) c.model.epsilon = g.eps.front();
  const LifespanRecord r = lifespan_record(c.model, c.solver);
  SweepResult one;
  one.records.push_back(r);
  std::ofstream os(out_file(c, "lifespan.csv"));
  write_sweep_csv(os, one);
  emit(g, record_json(r));
  return r.status == "blowup" || r.status == "no_blowup_expected" ? 0 : 1;
}

int cmd_sweep(const Globals& g) {
  RunConfig c = resolve(g);
  SweepSettings s;
  s.base = c.model;
  s.eps = g.eps.empty() ? c.sweep_eps : g.eps;
  s.knobs = c.solver;
  s.threads = c.threads;
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult res = sweep_lifespan(s);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const fs::path path = out_file(c, "sweep.csv");
  {
    std::ofstream os(path);
    write_sweep_csv(os, res);
  }
  json summary{{"csv", path.string()},
               {"partial", res.partial},
               {"error", res.error},
               {"expected_slope", res.expected_slope},
               {"seconds", secs}};
  if (res.fit) summary["fit"] = {{"slope", res.fit->slope}, {"intercept", res.fit->intercept}, {"r2", res.fit->r2}};
  summary["records"] = json::array();
  for (const auto& r : res.records) summary["records"].push_back(record_json(r));
  write_text(out_file(c, "sweep_summary.json"), summary.dump(2) + "\n");
  emit(g, summary);
  return res.partial ? 1 : 0;
}

int cmd_residual(const Globals& g) {
  RunConfig c = resolve(g);
  ResidualScanSettings s;
  s.base = c.model;
  s.eps = g.eps.empty() ? c.residual_eps : g.eps;
  s.budget = c.budget;
  s.approx = c.approx;
  s.threads = c.threads;
  const ResidualScan scan = residual_scan(s);
  const fs::path path = out_file(c, "residual.csv");
  {
    std::ofstream os(path);
    write_residual_csv(os, scan);
  }
  json summary{{"csv", path.string()},
               {"slope", scan.fit.slope},
               {"decreasing", scan.decreasing},
               {"checks", {check_json(scan.free_residual), check_json(scan.q2_decay), check_json(scan.matching),
                           check_json(scan.free_budget)}}};
  summary["rows"] = json::array();
  for (const auto& r : scan.rows) {
    summary["rows"].push_back({{"eps", r.eps},
                               {"T_B", r.budget.T_B},
                               {"I_free", r.budget.I_free},
                               {"I_blend", r.budget.I_blend},
                               {"I_profile", r.budget.I_profile},
                               {"I_total", r.budget.I_total}});
  }
  write_text(out_file(c, "residual_summary.json"), summary.dump(2) + "\n");
  emit(g, summary);
  return 0;
}

int cmd_bootstrap(const Globals& g, double fraction) {
  RunConfig c = resolve(g);
  const std::vector<double> eps = g.eps.empty() ? std::vector<double>{c.model.epsilon} : g.eps;
  const fs::path path = out_file(c, "bootstrap.csv");
  std::ofstream os(path);
  write_csv_row(os, {"eps", "t", "gap", "gap_over_eps"});
  json summary{{"csv", path.string()}, {"runs", json::array()}};
  bool all_within = true;
  for (double e : eps) {
    BootstrapSettings s;
    s.params = c.model;
    s.params.epsilon = e;
    s.fraction = fraction;
    s.knobs = c.solver;
    s.approx = c.approx;
    const BootstrapGap bg = bootstrap_run(s);
    for (std::size_t i = 0; i < bg.times.size(); ++i) {
      write_csv_row(os, {format_double(e), format_double(bg.times[i]), format_double(bg.gap[i]),
                         format_double(bg.gap_over_eps[i])});
    }
    all_within = all_within && bg.within_half;
    summary["runs"].push_back({{"eps", e}, {"max_gap_over_eps", bg.max_gap_over_eps}, {"within_half", bg.within_half}});
  }
  emit(g, summary);
  return all_within ? 0 : 1;
}

int cmd_props(const Globals& g, const std::vector<std::string>& suites, std::optional<double> lemma_scale,
              const char* file_name) {
  RunConfig c = resolve(g);
  PropertyOptions o;
  o.seed = c.seed;
  o.lemma_pairs = c.props.lemma_pairs;
  o.lemma_scale = lemma_scale.value_or(c.props.lemma_scale);
  o.threads = c.threads;
  const PropertyReport report = run_property_suites(o, suites);
  const std::string text = to_json(report);
  write_text(out_file(c, file_name), text + "\n");
  if (!g.quiet) std::cout << text << '\n';
  return report.passed ? 0 : 1;
}

int cmd_plot(const Globals& g, std::string input) {
  RunConfig c = resolve(g);
  if (input.empty()) input = (fs::path(c.output_dir) / "sweep.csv").string();
  std::ifstream is(input);
  if (!is) throw InvalidArgument("plot: cannot open '" + input + "'");
  const auto records = read_sweep_csv(is);
  const fs::path path = out_file(c, "sweep.svg");
  write_text(path, tools::render_sweep_svg(records, -lifespan_exponent(c.model.p)));
  emit(g, {{"svg", path.string()}, {"rows", records.size()}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Life-span experiments for the 1-D nonlinear Schroedinger equation"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "Output directory (overrides output.dir)");
  app.add_option("--seed", g.seed, "Seed for the property suites");
  app.add_option("--eps", g.eps, "Comma-separated eps values")->delimiter(',');
  app.add_flag("--quiet", g.quiet, "Suppress the JSON summary on stdout");

  auto* simulate = app.add_subcommand("simulate", "One evolve run; writes trajectory.csv");
  std::optional<double> t_end;
  simulate->add_option("--t-end", t_end, "End time (overrides simulate.t_end)");

  app.add_subcommand("lifespan", "Life span for one eps");
  app.add_subcommand("sweep", "Life spans over the eps ladder; writes sweep.csv");
  app.add_subcommand("residual", "Residual budget over the eps ladder; writes residual.csv");
  app.add_subcommand("profile-check", "Profile ODE, oracle and derivative-bound suites");

  auto* bootstrap = app.add_subcommand("bootstrap", "Gap between u_a and the computed solution; writes bootstrap.csv");
  double fraction = 0.8;
  bootstrap->add_option("--fraction", fraction, "Run up to this fraction of T_B")->check(CLI::Range(0.0, 1.0));

  auto* props = app.add_subcommand("props", "Property suites; writes props.json");
  std::vector<std::string> suites;
  std::optional<double> lemma_scale;
  props->add_option("--suite", suites, "Run only these suites")->check(CLI::IsMember(property_suite_names()));
  props->add_option("--lemma-scale", lemma_scale, "Scale of the pointwise-lemma constants (harness self-test)");

  auto* bound = app.add_subcommand("bound", "Theoretical constants A, liminf_const, T_B");
  std::optional<double> p, sup;
  std::vector<double> lambda;
  bound->add_option("--p", p, "Exponent p in [2, 3]");
  bound->add_option("--lambda", lambda, "lambda as re,im")->delimiter(',')->expected(2);
  bound->add_option("--sup", sup, "sup |hat phi| (default: from the profile)");

  auto* plot = app.add_subcommand("plot", "Render sweep.csv as an SVG figure");
  std::string input;
  plot->add_option("--input", input, "Sweep CSV (default <out>/sweep.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(simulate)) return cmd_simulate(g, t_end);
    if (app.got_subcommand("lifespan")) return cmd_lifespan(g);
    if (app.got_subcommand("sweep")) return cmd_sweep(g);
    if (app.got_subcommand("residual")) return cmd_residual(g);
    if (app.got_subcommand("profile-check")) {
      return cmd_props(g, {"profile_derivatives", "profile_identity"}, std::nullopt, "profile_check.json");
    }
    if (app.got_subcommand(bootstrap)) return cmd_bootstrap(g, fraction);
    if (app.got_subcommand(props)) return cmd_props(g, suites, lemma_scale, "props.json");
    if (app.got_subcommand(bound)) return cmd_bound(g, p, lambda, sup);
    if (app.got_subcommand(plot)) return cmd_plot(g, input);
  } catch (const std::exception& e) {
    std::cerr << "lifespan_lab: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

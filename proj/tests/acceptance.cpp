// Acceptance report: one PASS/FAIL line per criterion. Tolerances and time
// limits are fixed here; the exit status is non-zero when any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lifespan/approx.hpp"
#include "lifespan/csv.hpp"
#include "lifespan/experiments.hpp"
#include "lifespan/mollifier.hpp"
#include "lifespan/property_suites.hpp"
#include "lifespan/solver.hpp"

using namespace lifespan;

namespace {

const cplx kI(0.0, 1.0);

struct Outcome {
  bool ok = false;
  std::string detail;
};

ModelParams params(double p, cplx lambda, double eps) {
  ModelParams m;
  m.p = p;
  m.lambda = lambda;
  m.epsilon = eps;
  return m;
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

// 1. Life-span constants for p = 2, lambda = i, phi = e^{-x^2/2}.
Outcome bound_constants() {
  const ModelParams m = params(2.0, kI, 0.1);
  const TheoreticalBound b = theoretical_bound(m);
  const std::string a = format_double(b.A), l = format_double(*b.liminf_const);
  return {a == "1" && l == "0.25", "A=" + a + " liminf_const=" + l};
}

// 2. Life-span scaling over the desk ladder.
Outcome scaling_law() {
  SweepSettings s;
  s.base = params(2.0, kI, 0.5);
  const SweepResult r = sweep_lifespan(s);
  if (r.partial || !r.fit) return {false, "sweep incomplete: " + r.error};
  const double slope = r.fit->slope;
  bool band = true, trend = true;
  std::string scaled;
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const double v = r.records[i].scaled;
    band = band && v >= 0.20 && v <= 0.50;
    if (i > 0) trend = trend && std::abs(v - 0.25) < std::abs(r.records[i - 1].scaled - 0.25);
    scaled += (i ? "," : "") + fmt(v);
  }
  const std::size_t n = r.records.size();
  const bool ratio = r.records[n - 1].ratio >= 0.8 && r.records[n - 2].ratio >= 0.8;
  const bool slope_ok = slope >= -2.3 && slope <= -1.7;
  return {slope_ok && band && trend && ratio,
          "slope=" + fmt(slope) + (slope_ok ? "" : " (need [-2.3,-1.7])") + " eps^2*T=[" + scaled + "]" +
              (band ? "" : " (outside [0.20,0.50])") + (trend ? " trend ok" : " trend broken") +
              (ratio ? " ratio ok" : " ratio < 0.8")};
}

// 3. Closed-form profile against RK4 on random admissible parameters.
Outcome profile_oracle() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int draw = 0; draw < 200; ++draw) {
    ModelParams m = params(2.0 + 0.99 * U(rng), cplx(2.0 * U(rng) - 1.0, 0.2 + 1.8 * U(rng)), 0.1);
    m.profile = InitialProfile::gaussian(0.3 + 1.2 * U(rng), 0.5 + 1.5 * U(rng), 0.0, 2.0 * U(rng) - 1.0);
    const ProfileModel pm(m, 0.05, false);
    std::vector<double> s;
    for (int k = 1; k <= 4; ++k) s.push_back(pm.B() * (k - U(rng)) / 4.0);
    s.push_back(pm.B());
    const auto rk = rk4_oracle(s, m, pm.grid());
    for (std::size_t k = 0; k < s.size(); ++k) {
      const ProfileEval e = pm.eval(s[k]);
      for (std::size_t i = 0; i < e.V.size(); ++i) worst = std::max(worst, std::abs(e.V[i] - rk[k][i]));
    }
  }
  return {worst <= 1e-8, "max |V - V_rk4| = " + fmt(worst) + " over 200 draws (limit 1e-8)"};
}

// 4. Residual budget on the eps ladder.
Outcome residual_budget_scan() {
  ResidualScanSettings s;
  s.base = params(2.0, kI, 0.08);
  const ResidualScan r = residual_scan(s);
  bool checks = true;
  std::string detail = "slope=" + fmt(r.fit.slope) + (r.decreasing ? " decreasing" : " NOT decreasing");
  for (const BoundCheck* c : {&r.free_residual, &r.q2_decay, &r.matching, &r.free_budget}) {
    checks = checks && c->passed;
    detail += " " + c->name + ":C=" + fmt(c->fitted_constant) + (c->passed ? "" : "(violated)");
  }
  return {r.decreasing && r.fit.slope >= 1.2 && checks, detail};
}

// 5. Exactness anchors.
Outcome exactness() {
  double xn = 0.0, mass = 0.0, pointwise = 0.0;
  {
    ModelParams m = params(2.0, 0.0, 0.5);
    SolverKnobs k;
    k.t_end = 8.0;
    SolverConfig c = lifespan_config(m, k);
    c.record_times = lin_spaced(0.0, 8.0, 9);
    const Trajectory tr = evolve(c);
    const double sigma = tr.records.front().norms.sigma;
    for (const auto& r : tr.records) xn = std::max(xn, std::abs(r.norms.x_norm / sigma - 1.0));
  }
  {
    ModelParams m = params(2.0, 1.0, 0.2);
    SolverKnobs k;
    k.t_end = 5.0;
    SolverConfig c = lifespan_config(m, k);
    c.record_times = lin_spaced(0.0, 5.0, 11);
    const Trajectory tr = evolve(c);
    for (const auto& r : tr.records) mass = std::max(mass, std::abs(r.mass / tr.records.front().mass - 1.0));
  }
  {
    const Grid1D g(32.0, 2048);
    const SpectralOps ops(g);
    const ComplexField u0 = InitialProfile::gaussian().sample(g);
    for (double t : {0.5, 1.0, 3.0}) {
      const ComplexField u = ops.free_propagate(u0, t);
      const cplx z(1.0, t);
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = g.x(j);
        pointwise = std::max(pointwise, std::abs(u.values[j] - std::exp(-x * x / (2.0 * z)) / std::sqrt(z)));
      }
    }
  }
  return {xn <= 1e-9 && mass <= 1e-10 && pointwise <= 1e-9,
          "X-norm drift=" + fmt(xn) + " (1e-9) mass drift=" + fmt(mass) + " (1e-10) gaussian err=" + fmt(pointwise) +
              " (1e-9)"};
}

// 6. Inequality suites.
Outcome inequality_suites() {
  PropertyOptions o;
  const PropertyReport r = run_property_suites(
      o, {"pointwise_lemma", "dispersive_embedding", "nonlinear_difference", "profile_derivatives"});
  std::string detail;
  std::size_t checks = 0, violations = 0;
  for (const auto& s : r.suites) {
    detail += s.name + (s.passed ? ":ok " : ":FAIL ");
    for (const auto& c : s.checks) {
      ++checks;
      violations += c.violations;
    }
  }
  return {r.passed, detail + std::to_string(checks) + " fitted constants, " + std::to_string(violations) + " violations"};
}

// 7. Mollifier H^1 error sequence for gaussian data.
Outcome mollifier_sequence() {
  const InitialProfile g = InitialProfile::gaussian();
  const XiGrid grid = XiGrid::symmetric(0.0, 12.0, 1e-3);
  std::vector<cplx> hat(grid.count), dhat(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    hat[i] = g.hat(grid.at(i));
    dhat[i] = g.hat_derivative(grid.at(i));
  }
  std::vector<double> e;
  std::string detail = "H1 errors [";
  for (double d : {0.4, 0.2, 0.1, 0.05}) {
    e.push_back(mollification_error(hat, dhat, grid, 2.0, d).h1);
    detail += (e.size() > 1 ? "," : "") + fmt(e.back());
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < e.size(); ++k) decreasing = decreasing && e[k] < e[k - 1];
  return {decreasing && e.back() < 1e-3, detail + "]"};
}

// 8. Closed-form residual against finite differences in each region.
Outcome residual_consistency_orders() {
  double worst = 1e300;
  std::string detail;
  for (double eps : {0.08, 0.05}) {
    const ApproxContext ctx(params(2.0, kI, eps));
    for (double t : {0.5 / eps, 1.5 / eps, 0.5 * (2.0 / eps + ctx.T_B())}) {
      const ResidualConsistency rc = residual_consistency(ctx, t, 0.08, 3);
      for (double o : rc.orders) worst = std::min(worst, o);
    }
  }
  return {worst >= 1.9, "min observed order = " + fmt(worst) + " (need >= 1.9), eps in {0.08, 0.05}, 3 regions"};
}

// 9. Bootstrap gap up to 0.8 T_B.
Outcome bootstrap() {
  bool ok = true;
  std::string detail = "max gap/eps:";
  for (double eps : {0.3, 0.2, 0.1, 0.05}) {
    BootstrapSettings s;
    s.params = params(2.0, kI, eps);
    s.fraction = 0.8;
    const BootstrapGap g = bootstrap_run(s);
    ok = ok && g.max_gap_over_eps <= 0.5;
    detail += " eps=" + fmt(eps) + ":" + fmt(g.max_gap_over_eps);
  }
  return {ok, detail + " (limit 0.5)"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "theorem constants", 1.0, bound_constants},
      {2, "life-span scaling law", 600.0, scaling_law},
      {3, "profile vs RK4 oracle", 60.0, profile_oracle},
      {4, "residual budget", 300.0, residual_budget_scan},
      {5, "exactness anchors", 60.0, exactness},
      {6, "inequality suites", 120.0, inequality_suites},
      {7, "mollifier convergence", 30.0, mollifier_sequence},
      {8, "residual self-consistency", 120.0, residual_consistency_orders},
      {9, "bootstrap gap", 300.0, bootstrap},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = o.ok && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s [%d] %s: %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.limit_seconds, in_time ? "" : " TOO SLOW");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

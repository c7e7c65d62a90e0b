#pragma once

// Orchestration on top of the solver and the approximate solution: the
// theoretical bound, life-span sweeps over eps, residual-budget scans, the
// bootstrap-gap and decay runs, and their CSV output.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lifespan/approx.hpp"
#include "lifespan/bounds.hpp"
#include "lifespan/numerics.hpp"
#include "lifespan/profile.hpp"
#include "lifespan/solver.hpp"

namespace lifespan {

inline constexpr int kCsvSchemaVersion = 1;

struct TheoreticalBound {
  double p = 2.0;
  double A = 0.0;
  /// ((3-p) A / 2)^{2/(3-p)}; absent for p = 3.
  std::optional<double> liminf_const;
  /// ((3-p) B / (2 eps^{p-1}))^{2/(3-p)} when eps and B are given.
  std::optional<double> T_B;
  /// 1 / (2 Im(lambda) sup|hat phi|^2) for p = 3.
  std::optional<double> p3_log_bound;
};

/// Accepts 2 <= p <= 3; p = 3 yields the logarithmic bound only.
TheoreticalBound theoretical_bound(double p, cplx lambda, double hat_sup,
                                   std::optional<double> eps = std::nullopt,
                                   std::optional<double> B = std::nullopt);
TheoreticalBound theoretical_bound(const ModelParams& params);

/// Life-span exponent 2(p-1)/(3-p).
double lifespan_exponent(double p);

/// Solver knobs shared by every run of a sweep.
struct SolverKnobs {
  double dt_initial = 0.01;
  double dt_floor = 1e-9;
  double K_b = 50.0;
  double tau_scale = 0.1;
  double boundary_tol = 1e-12;
  double bisection_rel_width = 1e-3;
  /// t_end = horizon_factor * liminf_const / eps^{2(p-1)/(3-p)}.
  double horizon_factor = 3.0;
  /// k_max = k_max_factor * (|k| + xi cutoff) for the grid rule.
  double k_max_factor = 2.0;
  /// Multiplies the horizon in the grid rule when lambda != 0: the
  /// nonlinearity sheds small fast tails that the linear reach misses.
  double nonlinear_reach = 2.0;
  /// Overrides the horizon rule (required when Im(lambda) <= 0).
  std::optional<double> t_end;
  /// Overrides the grid rule when set.
  std::optional<Grid1D> grid;
};

SolverConfig lifespan_config(const ModelParams& params, const SolverKnobs& knobs);

struct LifespanRecord {
  double eps = 0.0;
  double T_num = 0.0;
  double scaled = 0.0;
  double bound_const = 0.0;
  double ratio = 0.0;
  std::string termination;
  double L = 0.0;
  std::size_t N = 0;
  double dt_floor = 0.0;
  double K_b = 0.0;
  double B_over_A = 0.0;
  std::string status;
  std::string diagnostic;
};

LifespanRecord lifespan_record(const ModelParams& params, const SolverKnobs& knobs);

/// Worker count: `requested` if non-zero, else the hardware concurrency,
/// capped by LIFESPAN_LAB_THREADS when set.
std::size_t worker_threads(std::size_t requested = 0);

/// Runs body(i) for i < n on a pool; the first exception stops new work and
/// is rethrown after the pool drains.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

struct SweepSettings {
  ModelParams base;
  std::vector<double> eps{0.5, 0.4, 0.3, 0.25, 0.2};
  SolverKnobs knobs;
  std::size_t threads = 0;
};

struct SweepResult {
  std::vector<LifespanRecord> records;
  /// log T_num = slope log eps + intercept over rows that blew up.
  std::optional<LinearFit> fit;
  double expected_slope = 0.0;
  bool partial = false;
  std::string error;
};

/// Records come back in ladder order. A failing run (exception or a status
/// other than blowup) marks the result partial and cancels pending runs.
SweepResult sweep_lifespan(const SweepSettings& settings);

void write_sweep_csv(std::ostream& os, const SweepResult& result);
/// Reads back the rows written by write_sweep_csv (comment lines skipped).
std::vector<LifespanRecord> read_sweep_csv(std::istream& is);

struct ResidualScanSettings {
  ModelParams base;
  std::vector<double> eps{0.08, 0.06, 0.04, 0.03, 0.02};
  BudgetOptions budget;
  ApproxOptions approx;
  /// Sample counts for the profile-region Q2 check and the matching gap.
  std::size_t q2_samples = 24;
  std::size_t gap_samples = 12;
  std::size_t threads = 0;
};

struct ResidualScanRow {
  double eps = 0.0;
  double delta = 0.0;
  ResidualBudget budget;
  std::size_t L_points = 0;
  double L = 0.0;
};

struct ResidualScan {
  std::vector<ResidualScanRow> rows;
  /// log I_total against log eps.
  LinearFit fit;
  bool decreasing = false;
  /// ||R||_X <= C eps^p (1+t)^{-(p-1)/2} on the free region.
  BoundCheck free_residual;
  /// ||Q2||_X <= C eps t^{-2} delta^{-2} on the profile region.
  BoundCheck q2_decay;
  /// ||U(t)(eps phi) - m(t)||_X <= C eps^{3/2} on the blend region.
  BoundCheck matching;
  /// I_free <= C eps^{3/2}.
  BoundCheck free_budget;
};

ResidualScan residual_scan(const ResidualScanSettings& settings);
void write_residual_csv(std::ostream& os, const ResidualScan& scan);

struct BootstrapSettings {
  ModelParams params;
  /// Runs up to fraction * T_B.
  double fraction = 0.8;
  std::size_t records = 40;
  SolverKnobs knobs;
  ApproxOptions approx;
};

/// Evolves u on the approximation grid and compares it with u_a.
BootstrapGap bootstrap_run(const BootstrapSettings& settings);

struct DecaySample {
  double t = 0.0;
  double sup = 0.0;
  /// sup |u| (1+t)^{1/(p-1)}.
  double weighted = 0.0;
  double mass = 0.0;
};

/// Records sup|u|, its weighted form and the mass on a uniform time ladder.
std::vector<DecaySample> decay_run(const ModelParams& params, double t_end, std::size_t records,
                                   const SolverKnobs& knobs);

}  // namespace lifespan

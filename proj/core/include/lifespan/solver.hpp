#pragma once

// Strang split-step integration of
//   i u_t + u_xx / 2 = lambda |u|^{p-1} u,   u(0) = eps phi,
// with an exact pointwise nonlinear substep, adaptive steps, blow-up
// detection and the empirical life-span estimator.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lifespan/grid.hpp"
#include "lifespan/profile.hpp"
#include "lifespan/spectral.hpp"

namespace lifespan {

struct SolverConfig {
  ModelParams params;
  Grid1D grid{32.0, 2048};
  double dt_initial = 0.01;
  double dt_floor = 1e-9;
  /// K_b: blow-up is declared once sup|u| >= K_b sup|u(0)|.
  double amp_blowup_factor = 50.0;
  double tau_scale = 0.1;
  double t_end = 1.0;
  /// Times at which the state is recorded (sorted internally, clipped to t_end).
  std::vector<double> record_times;
  bool keep_fields = true;
  /// Largest boundary-to-peak ratio accepted at record times; <= 0 disables.
  double boundary_tol = 1e-12;
  /// Relative width of the final bisection bracket in estimate_lifespan.
  double bisection_rel_width = 1e-3;

  void validate() const;
};

enum class Termination { reached_t_end, blowup_amplitude, blowup_w_floor, dt_underflow };
const char* to_string(Termination t);

struct TrajectoryRecord {
  double t = 0.0;
  std::optional<ComplexField> field;
  NormReport norms;
  /// ||u||_2^2 and int |u|^{p+1}.
  double mass = 0.0;
  double power_integral = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  Termination termination = Termination::reached_t_end;
  /// Last time reached with a valid state.
  double t_final = 0.0;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
  double initial_sup = 0.0;
};

/// Result of a substep: the new field, or the position where W_loc fell to
/// the floor (the field is then left unchanged).
struct StepResult {
  ComplexField field;
  std::optional<double> blowup_x;
};

/// Exact flow of i u_t = lambda |u|^{p-1} u over dt at every grid point.
StepResult nonlinear_substep(const ComplexField& field, double dt, const ModelParams& params);

/// K(dt/2) NL(dt) K(dt/2).
StepResult strang_step(const ComplexField& field, double dt, const ModelParams& params,
                       const SpectralOps& ops);

/// u(0) = eps phi sampled on the grid.
ComplexField initial_field(const ModelParams& params, const Grid1D& grid);

/// Adaptive step dt_initial / (1 + |lambda| sup|u|^{p-1} tau_scale).
double adaptive_dt(const SolverConfig& config, double sup_u);

/// ||u||_2^2 and int |u|^{q} by the rectangle rule (spectrally accurate for
/// periodic smooth data).
double mass(const ComplexField& field);
double power_integral(const ComplexField& field, double q);

Trajectory evolve(const SolverConfig& config);

enum class LifespanStatus { blowup, dt_underflow, no_blowup_expected, horizon_exhausted };
const char* to_string(LifespanStatus s);

struct LifespanEstimate {
  LifespanStatus status = LifespanStatus::horizon_exhausted;
  Termination termination = Termination::reached_t_end;
  /// Operational blow-up time (threshold plus bisection); +inf when none.
  double T_num = 0.0;
  /// Bisection bracket [T_lower, T_num].
  double T_lower = 0.0;
  double t_reached = 0.0;
  std::size_t steps = 0;
  double initial_sup = 0.0;
  std::string diagnostic;
};

/// Runs to the blow-up criterion and bisects the final step. With
/// Im(lambda) <= 0 the run still goes to t_end but reports no_blowup_expected.
LifespanEstimate estimate_lifespan(const SolverConfig& config);

}  // namespace lifespan

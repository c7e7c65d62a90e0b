#pragma once

// The approximate solution
//   u_a(t) = chi(eps t) U(t)(eps phi) + (1 - chi(eps t)) m(t),
//   m(t, x) = eps M(t) t^{-1/2} V_delta(s(t), x / t),
// its residual R = L u_a - N(u_a) with L = i d_t + d_x^2 / 2, and the
// diagnostics built on them (matching gap, residual budget, bootstrap gap).

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lifespan/grid.hpp"
#include "lifespan/profile.hpp"
#include "lifespan/solver.hpp"
#include "lifespan/spectral.hpp"

namespace lifespan {

/// chi(tau): 1 for tau <= 1, 0 for tau >= 2, the normalised bump integral in
/// between. chi(1.5) = 1/2.
double cutoff_chi(double tau);
double cutoff_chi_derivative(double tau);

enum class Region { free, blend, profile };
const char* to_string(Region r);

struct ApproxOptions {
  /// Frequency grid spacing of the profile model.
  double xi_spacing = 5e-4;
  /// Relative level at which the transform of phi is cut off.
  double xi_rel = 1e-14;
  bool mollified = true;
  /// Spatial grid; sized from T_B and the frequency reach when absent.
  std::optional<Grid1D> grid;
};

/// Everything that is fixed for one (params, grid): the profile model, the
/// spectral operators and the sampled initial datum. Requires eps < 1 and a
/// finite profile horizon.
class ApproxContext {
 public:
  explicit ApproxContext(const ModelParams& params, const ApproxOptions& options = {});

  const ModelParams& params() const noexcept { return model_->params(); }
  const ProfileModel& model() const noexcept { return *model_; }
  const SpectralOps& ops() const noexcept { return ops_; }
  const Grid1D& grid() const noexcept { return ops_.grid(); }
  double epsilon() const noexcept { return params().epsilon; }
  double T_B() const noexcept { return T_B_; }
  Region region(double t) const;

  /// U(t)(eps phi).
  ComplexField free_wave(double t) const;
  /// m(t), requires 1 < t <= T_B.
  ComplexField modified_profile(double t) const;

 private:
  std::shared_ptr<const ProfileModel> model_;
  SpectralOps ops_;
  ComplexField initial_;
  double T_B_;
};

/// Grid covering x in t [xi_min, xi_max] up to T_B with local frequencies
/// up to the profile's reach resolved.
Grid1D approx_grid(const ModelParams& params, double xi_rel = 1e-14);

struct ApproxState {
  double t = 0.0;
  Region region = Region::free;
  double chi = 1.0;
  /// d/dt chi(eps t).
  double chi_dot = 0.0;
  ComplexField u_free;
  ComplexField m;
  ComplexField u_a;
  /// Populated by residual_R only.
  std::optional<ComplexField> R;
  std::optional<ComplexField> Q1;
  std::optional<ComplexField> Q2;
};

/// N(u) = lambda |u|^{p-1} u.
ComplexField nonlinearity(const ComplexField& u, const ModelParams& params);

ComplexField modified_profile_m(const ApproxContext& ctx, double t);
ApproxState approx_solution_ua(const ApproxContext& ctx, double t);
/// R from closed forms in each region (no time differencing).
ApproxState residual_R(const ApproxContext& ctx, double t);
/// Q1 + Q2 = L m - N(m) from the profile data.
void profile_remainders(const ApproxContext& ctx, double t, ComplexField& Q1, ComplexField& Q2);

/// L u_a - N(u_a) with a fourth-order centred difference of step h in t and a
/// spectral second derivative in x.
ComplexField residual_fd(const ApproxContext& ctx, double t, double h);

struct ResidualConsistency {
  double t = 0.0;
  Region region = Region::free;
  double R_x_norm = 0.0;
  std::vector<double> steps;
  /// ||R - R_fd(h)||_X / ||R||_X for each step.
  std::vector<double> rel_gaps;
  /// log2 of successive gap ratios.
  std::vector<double> orders;
};
/// Compares the closed form against residual_fd at h, h/2, h/4, ...
ResidualConsistency residual_consistency(const ApproxContext& ctx, double t, double h,
                                         std::size_t levels = 3);

struct MatchingGap {
  double t = 0.0;
  NormReport gap;
  /// eps^p t^{(3-p)/2} and eps / t.
  double f1_budget = 0.0;
  double f2_budget = 0.0;
};
/// ||U(t)(eps phi) - m(t)||_X for t in (1/eps, 2/eps).
MatchingGap matching_gap(const ApproxContext& ctx, double t);

struct BudgetOptions {
  std::size_t nodes = 200;
  double rel_tol = 0.01;
  std::size_t max_doublings = 4;
  /// Start of the log ladder in the free region (0 is added as a node).
  double t_min = 1e-3;
};

struct RegionIntegral {
  Region region = Region::free;
  double t0 = 0.0;
  double t1 = 0.0;
  double value = 0.0;
  std::size_t nodes = 0;
  std::vector<double> times;
  std::vector<double> norms;
};

struct ResidualBudget {
  double epsilon = 0.0;
  double T_B = 0.0;
  double I_free = 0.0;
  double I_blend = 0.0;
  double I_profile = 0.0;
  double I_total = 0.0;
  std::vector<RegionIntegral> regions;
};

/// int_0^{T_B} ||R(t)||_X dt by region, on log-spaced ladders refined by
/// doubling until stable to rel_tol. Throws ConvergenceError with the node
/// dump when refinement does not settle.
ResidualBudget residual_budget(const ApproxContext& ctx, const BudgetOptions& options = {});

struct BootstrapGap {
  std::vector<double> times;
  std::vector<double> gap;
  std::vector<double> gap_over_eps;
  double max_gap_over_eps = 0.0;
  /// gap <= eps / 2 at every sampled time.
  bool within_half = true;
};

/// ||u_a(t) - u(t)||_X at the trajectory's recorded fields.
BootstrapGap bootstrap_gap(const ApproxContext& ctx, const Trajectory& trajectory);

}  // namespace lifespan

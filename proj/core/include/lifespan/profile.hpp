#pragma once

// The profile ODE  i d_s V = lambda |V|^{p-1} V,  V(0, xi) = e^{-i pi/4} hat phi(xi),
// its closed-form solution (plain and mollified), the blow-up constant A,
// the time change s(t), and an independent RK4 integrator used as an oracle.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lifespan/grid.hpp"
#include "lifespan/mollifier.hpp"
#include "lifespan/numerics.hpp"

namespace lifespan {

class SpectralOps;

enum class ProfileKind { gaussian, sech, hermite1, sampled };

/// Initial datum phi. Analytic kinds are
///   gaussian:  a exp(-(x-c)^2 / (2 w^2)) e^{i k x}
///   sech:      a sech((x-c)/w) e^{i k x}
///   hermite1:  a ((x-c)/w) exp(-(x-c)^2 / (2 w^2)) e^{i k x}
/// and have closed-form transforms. `sampled` holds values on a uniform grid
/// over [-half_width, half_width) and is transformed by direct quadrature.
struct InitialProfile {
  ProfileKind kind = ProfileKind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  double wavenumber = 0.0;
  double sample_half_width = 0.0;
  std::vector<cplx> samples;

  static InitialProfile gaussian(double amplitude = 1.0, double width = 1.0, double center = 0.0,
                                 double wavenumber = 0.0);
  static InitialProfile sampled(double half_width, std::vector<cplx> values);

  void validate() const;

  cplx value(double x) const;
  cplx hat(double xi) const;
  /// d/dxi hat phi = -i (x phi)^.
  cplx hat_derivative(double xi) const;

  ComplexField sample(const Grid1D& grid) const;

  /// sup |hat phi|, closed form where available, otherwise a dense scan with
  /// a Brent refinement of the best cell.
  double hat_sup() const;
  std::optional<double> hat_sup_closed_form() const;

  /// Half-width around `wavenumber` outside which |hat phi| < rel * sup.
  double xi_cutoff(double rel = 1e-17) const;
  /// Radius around `wavenumber` holding `fraction` of the spectral energy.
  double spectral_radius(double fraction = 0.999) const;

  std::string describe() const;
};

const char* to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

struct ModelParams {
  double p = 2.0;
  cplx lambda{0.0, 1.0};
  double epsilon = 0.1;
  /// Mollification width; defaults to epsilon^{1/4}.
  std::optional<double> delta;
  /// Profile horizon as a fraction of A (used when B is not given).
  double B_over_A = 0.9;
  std::optional<double> B;
  InitialProfile profile;

  double delta_value() const;
  /// Throws InvalidArgument on 2 <= p < 3, epsilon > 0, delta > 0 violations.
  void validate() const;
};

/// A in (0, inf]: 1/A = (p-1) Im(lambda) sup|hat phi|^{p-1}; +inf when
/// Im(lambda) <= 0 or phi = 0.
double blowup_constant_A(double p, cplx lambda, double hat_sup);
double blowup_constant_A(const ModelParams& params);
/// Same, with sup|hat phi| taken from the resolved DFT of phi on `ops`'s grid
/// (grid maximum plus parabolic refinement). Throws ResolutionError when the
/// top octave carries more than `tail_tol` of the spectral energy.
double blowup_constant_A(const ModelParams& params, const SpectralOps& ops, double tail_tol = 1e-20);
double sup_hat_on_grid(const InitialProfile& profile, const SpectralOps& ops, double tail_tol = 1e-20);

/// B for these parameters: params.B if set, else B_over_A * A.
double profile_horizon(const ModelParams& params);

/// s(t) = 2 eps^{p-1} t^{(3-p)/2} / (3-p) and its inverse.
double s_of_t(double t, double p, double epsilon);
double t_of_s(double s, double p, double epsilon);

/// Closed-form profile data at one s on a frequency grid.
struct ProfileEval {
  double s = 0.0;
  XiGrid grid;
  std::vector<double> W;
  std::vector<double> G;
  std::vector<cplx> V;
  std::vector<cplx> dV;
  std::vector<cplx> d2V;
  std::vector<cplx> dsV;
  /// lambda W^{-p/(p-1)} e^{iG} hat phi (a - |hat phi|^{p-1}), the profile
  /// residual i d_s V - N(V).
  std::vector<cplx> residual;
};

inline constexpr double kWFloor = 1e-9;

/// Profile data precomputed on a frequency grid: hat phi, |hat phi|^{p-1}
/// and its mollification. Immutable after construction.
class ProfileModel {
 public:
  /// Grid spanning the profile's cutoff with the given spacing.
  ProfileModel(const ModelParams& params, double spacing, bool mollified);
  ProfileModel(const ModelParams& params, const XiGrid& grid, bool mollified);

  const ModelParams& params() const noexcept { return params_; }
  const XiGrid& grid() const noexcept { return grid_; }
  bool mollified() const noexcept { return mollified_; }
  double A() const noexcept { return A_; }
  double B() const noexcept { return B_; }

  std::span<const cplx> hat() const noexcept { return hat_; }
  std::span<const cplx> hat_derivative() const noexcept { return dhat_; }
  /// |hat phi|^{p-1}.
  std::span<const double> amplitude() const noexcept { return amplitude_; }
  /// rho_delta * |hat phi|^{p-1}, or |hat phi|^{p-1} when not mollified.
  std::span<const double> mollified_amplitude() const noexcept { return mollified_amplitude_; }

  /// W, G, V and derivatives at s in [0, B]. Throws BlowupError when s > B
  /// or W drops below kWFloor.
  ProfileEval eval(double s) const;

  /// The factor W^{-k/(p-1)} e^{iG} (k = 1 or p) on the grid.
  std::vector<cplx> phase_factor(double s, double power) const;
  /// d_s of W^{-1/(p-1)} e^{iG}.
  std::vector<cplx> phase_factor_ds(double s) const;

 private:
  void build();
  void check_range(double s) const;
  std::vector<double> w_of(double s) const;
  std::vector<double> g_of(double s, std::span<const double> w) const;

  ModelParams params_;
  XiGrid grid_;
  bool mollified_;
  double A_;
  double B_;
  std::vector<cplx> hat_;
  std::vector<cplx> dhat_;
  std::vector<double> amplitude_;
  std::vector<double> mollified_amplitude_;
};

/// Classical RK4 for the unmollified profile ODE at each frequency, with step
/// doubling until successive results differ by less than `tol`. Returns V at
/// each requested s (ascending, all < A (1 - 1e-3)).
std::vector<std::vector<cplx>> rk4_oracle(std::span<const double> s_points, const ModelParams& params,
                                          const XiGrid& grid, double tol = 1e-10);
std::vector<cplx> rk4_oracle(double s_end, const ModelParams& params, const XiGrid& grid,
                             double tol = 1e-10);

/// Scalar version for one initial value; used by the nonlinear substep test.
cplx rk4_scalar(cplx v0, double s_end, double p, cplx lambda, double tol = 1e-10);

struct ProfileResidual {
  /// i d_s V_delta - N(V_delta) with d_s by a centered difference of step h.
  std::vector<cplx> lhs;
  /// lambda W^{-p/(p-1)} e^{iG} hat phi (rho_delta * |hat phi|^{p-1} - |hat phi|^{p-1}).
  std::vector<cplx> rhs;
  double max_gap = 0.0;
};

ProfileResidual profile_residual(const ProfileModel& model, double s, double h);

}  // namespace lifespan

#pragma once

// Fourier conventions, the free propagator, the operators M(t) and J, and the
// norms used throughout the library.
//
// Convention (used everywhere, do not re-derive elsewhere):
//   hat f(xi) = (2 pi)^{-1/2} int exp(-i x xi) f(x) dx,
// approximated on Grid1D by (2 pi)^{-1/2} dx sum_j exp(-i x_j xi_k) f(x_j).

#include <memory>
#include <vector>

#include "lifespan/fft.hpp"
#include "lifespan/grid.hpp"

namespace lifespan {

inline constexpr double kInvSqrtTwoPi = 0.39894228040143267794;

struct NormReport {
  double l2 = 0.0;
  double l_inf = 0.0;
  double h1 = 0.0;
  /// ||f||_2 + ||f'||_2 + ||x f||_2, i.e. the X-norm at t = 0.
  double sigma = 0.0;
  double x_norm = 0.0;
  double l2_part = 0.0;
  double dx_part = 0.0;
  double j_part = 0.0;
};

/// Spectral operators bound to one grid. Holds a shared FFT plan and the
/// cached position/frequency tables; cheap to copy and safe to share.
class SpectralOps {
 public:
  explicit SpectralOps(const Grid1D& grid);

  const Grid1D& grid() const noexcept { return grid_; }
  const std::vector<double>& positions() const noexcept { return *x_; }
  /// Frequencies in FFT bin order.
  const std::vector<double>& fft_frequencies() const noexcept { return *xi_; }
  const FftPlan& plan() const noexcept { return *plan_; }

  Spectrum fourier_transform(const ComplexField& field) const;
  ComplexField inverse_fourier_transform(const Spectrum& spectrum, double time = 0.0) const;

  /// U(t) = exp(i t Delta / 2); the result is stamped field.time + t.
  ComplexField free_propagate(const ComplexField& field, double t) const;

  /// Multiplication by exp(i sign x^2 / (2t)); t must be non-zero.
  ComplexField apply_M(const ComplexField& field, double t, int sign) const;

  /// J u = x u + i t d_x u with a spectral derivative.
  ComplexField apply_J(const ComplexField& field, double t) const;
  /// J through the identity J = M(t) (i t d_x) M(-t); requires t > 0.
  ComplexField apply_J_conjugated(const ComplexField& field, double t) const;

  /// Spectral derivative of the given order (1 or 2).
  ComplexField derivative(const ComplexField& field, int order = 1) const;

  NormReport norms(const ComplexField& field, double t) const;
  NormReport norms(const ComplexField& field) const { return norms(field, field.time); }
  double x_norm(const ComplexField& field, double t) const { return norms(field, t).x_norm; }

  /// Largest |u| over the outer 1/64 of the box on each side, relative to
  /// the peak. Zero fields report 0.
  double boundary_ratio(const ComplexField& field) const;
  /// Throws DomainError when boundary_ratio exceeds tol.
  void check_boundary(const ComplexField& field, double tol, const char* where) const;

  /// Fraction of spectral energy in the top octave |xi| > nyquist/2.
  double top_octave_energy(const ComplexField& field) const;

 private:
  Grid1D grid_;
  std::shared_ptr<const FftPlan> plan_;
  std::shared_ptr<const std::vector<double>> x_;
  std::shared_ptr<const std::vector<double>> xi_;
};

double l2_norm(const ComplexField& field);
double sup_norm(const ComplexField& field);

/// Grid sizing rule: L >= 8 + 4 T xi_eff, with N the smallest power of two
/// keeping pi/dx >= k_max.
Grid1D grid_for_horizon(double horizon, double xi_eff, double k_max, double min_half_width = 32.0);

}  // namespace lifespan

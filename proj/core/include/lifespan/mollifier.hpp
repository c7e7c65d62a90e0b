#pragma once

// The smooth bump rho(y) = exp(-1/(1 - y^2)) / Z on (-1, 1), its rescaled
// kernels rho_delta(y) = rho(y / delta) / delta, discrete convolution on a
// uniform frequency grid, and the H^1 mollification error.

#include <span>
#include <vector>

#include "lifespan/grid.hpp"
#include "lifespan/numerics.hpp"

namespace lifespan {

/// Z = int_{-1}^{1} exp(-1/(1-y^2)) dy.
double bump_normalization();
/// rho(y); zero for |y| >= 1.
double bump_density(double y);
/// int_{-1}^{y} rho.
double bump_cumulative(double y);

/// Samples of rho_delta at offsets (i - half) * spacing, with trapezoid
/// weights rescaled so they sum to exactly one.
struct Kernel {
  double delta = 0.0;
  double spacing = 0.0;
  std::size_t half = 0;
  /// rho_delta sampled at offsets -half..half.
  std::vector<double> samples;
  /// Quadrature weights (samples * spacing, normalised).
  std::vector<double> weights;
  /// sum(samples) * spacing - 1 before normalisation.
  double normalization_defect = 0.0;

  double offset(std::size_t i) const noexcept {
    return (static_cast<double>(i) - static_cast<double>(half)) * spacing;
  }
};

/// Requires delta >= 3 * spacing (at least six samples inside the support).
Kernel bump_kernel(double delta, double spacing);

/// (rho_delta * f) on the same grid, by direct summation over the kernel
/// window. Samples beyond the ends are taken equal to the nearest end value.
std::vector<double> mollify(std::span<const double> f, const Kernel& kernel);

/// |hat phi|^{p-1} and its derivative (p-1) |hat phi|^{p-2} Re(e^{-i arg} hat phi').
struct PowerAmplitude {
  std::vector<double> value;
  std::vector<double> derivative;
};
PowerAmplitude power_amplitude(std::span<const cplx> hat, std::span<const cplx> dhat, double p);

struct MollificationError {
  double delta = 0.0;
  double l2_part = 0.0;
  double derivative_part = 0.0;
  /// sqrt(l2_part^2 + derivative_part^2).
  double h1 = 0.0;
};

/// || rho_delta * |hat phi|^{p-1} - |hat phi|^{p-1} ||_{H^1} on `grid`.
MollificationError mollification_error(std::span<const cplx> hat, std::span<const cplx> dhat,
                                       const XiGrid& grid, double p, double delta);

/// ||g||_{H^1} with g = |hat phi|^{p-1}.
double power_amplitude_h1(std::span<const cplx> hat, std::span<const cplx> dhat,
                          const XiGrid& grid, double p);

/// Monotone envelope O(delta_k) = min(cap, max_{delta_j <= delta_k} err_j).
/// `deltas` need not be sorted; the result is aligned with the input.
std::vector<double> error_envelope(std::span<const double> deltas, std::span<const double> errors,
                                   double cap);

}  // namespace lifespan

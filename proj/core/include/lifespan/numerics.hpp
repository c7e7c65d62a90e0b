#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lifespan/grid.hpp"

namespace lifespan {

/// Uniform grid in frequency space: start + i * spacing, i < count.
struct XiGrid {
  double start = 0.0;
  double spacing = 1.0;
  std::size_t count = 0;

  double at(std::size_t i) const noexcept { return start + static_cast<double>(i) * spacing; }
  double end() const noexcept { return at(count - 1); }
  static XiGrid symmetric(double center, double half_range, double spacing);
};

/// Finite-difference weights for the derivative of order `order` at `x0`
/// from samples at `nodes` (Fornberg's recursion).
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order);

/// Fourth-order derivative of uniformly spaced samples. Interior points use
/// centered stencils; the stencil window shifts inward near the ends.
std::vector<cplx> fd_derivative(std::span<const cplx> f, double h, int order);
std::vector<double> fd_derivative(std::span<const double> f, double h, int order);

/// Four-point Lagrange interpolation on a uniform grid; zero outside it.
cplx cubic_interpolate(std::span<const cplx> f, const XiGrid& grid, double x);
double cubic_interpolate(std::span<const double> f, const XiGrid& grid, double x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);
/// Fit log(y) = slope * log(x) + intercept.
LinearFit fit_loglog(std::span<const double> x, std::span<const double> y);

double trapezoid(std::span<const double> x, std::span<const double> y);

/// n points from a to b (inclusive), geometrically spaced; a, b > 0.
std::vector<double> log_spaced(double a, double b, std::size_t n);
std::vector<double> lin_spaced(double a, double b, std::size_t n);

}  // namespace lifespan

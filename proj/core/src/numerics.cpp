#include "lifespan/numerics.hpp"

#include <algorithm>
#include <numeric>

#include "lifespan/error.hpp"

namespace lifespan {

XiGrid XiGrid::symmetric(double center, double half_range, double spacing) {
  if (!(half_range > 0.0) || !(spacing > 0.0)) {
    throw InvalidArgument("XiGrid: half_range and spacing must be positive");
  }
  const auto half = static_cast<std::size_t>(std::ceil(half_range / spacing));
  return XiGrid{center - static_cast<double>(half) * spacing, spacing, 2 * half + 1};
}

std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order) {
  const int n = static_cast<int>(nodes.size()) - 1;
  if (n < order) throw InvalidArgument("fd_weights: not enough nodes for the derivative order");
  // c[j][k]: weight of node j for derivative k.
  std::vector<std::vector<double>> c(nodes.size(), std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) w[j] = c[j][order];
  return w;
}

namespace {

template <class T>
std::vector<T> fd_derivative_impl(std::span<const T> f, double h, int order) {
  if (order < 1 || order > 3) throw InvalidArgument("fd_derivative: order must be 1, 2 or 3");
  // Fourth-order accuracy needs order + 4 nodes (order + 3 for centered odd
  // derivatives, rounded up to an odd width).
  const int width = (order == 3) ? 7 : 5;
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  if (n < width) throw InvalidArgument("fd_derivative: too few samples");
  const int half = width / 2;

  // Weights depend only on the offset of the evaluation point in the window.
  std::vector<std::vector<double>> table(width);
  std::vector<double> nodes(width);
  std::iota(nodes.begin(), nodes.end(), 0.0);
  for (int pos = 0; pos < width; ++pos) {
    table[pos] = fd_weights(static_cast<double>(pos), nodes, order);
    for (auto& w : table[pos]) w /= std::pow(h, order);
  }

  std::vector<T> out(f.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t first = std::clamp<std::ptrdiff_t>(i - half, 0, n - width);
    const auto& w = table[i - first];
    T acc{};
    for (int k = 0; k < width; ++k) acc += w[k] * f[first + k];
    out[i] = acc;
  }
  return out;
}

template <class T>
T cubic_impl(std::span<const T> f, const XiGrid& grid, double x) {
  const double u = (x - grid.start) / grid.spacing;
  const auto n = static_cast<std::ptrdiff_t>(grid.count);
  if (!(u >= 0.0) || u > static_cast<double>(n - 1)) return T{};
  auto i0 = static_cast<std::ptrdiff_t>(std::floor(u)) - 1;
  i0 = std::clamp<std::ptrdiff_t>(i0, 0, n - 4);
  const double r = u - static_cast<double>(i0);
  // Lagrange basis on nodes 0, 1, 2, 3.
  const double l0 = -(r - 1.0) * (r - 2.0) * (r - 3.0) / 6.0;
  const double l1 = r * (r - 2.0) * (r - 3.0) / 2.0;
  const double l2 = -r * (r - 1.0) * (r - 3.0) / 2.0;
  const double l3 = r * (r - 1.0) * (r - 2.0) / 6.0;
  return l0 * f[i0] + l1 * f[i0 + 1] + l2 * f[i0 + 2] + l3 * f[i0 + 3];
}

}  // namespace

std::vector<cplx> fd_derivative(std::span<const cplx> f, double h, int order) {
  return fd_derivative_impl(f, h, order);
}

std::vector<double> fd_derivative(std::span<const double> f, double h, int order) {
  return fd_derivative_impl(f, h, order);
}

cplx cubic_interpolate(std::span<const cplx> f, const XiGrid& grid, double x) {
  return cubic_impl(f, grid, x);
}

double cubic_interpolate(std::span<const double> f, const XiGrid& grid, double x) {
  return cubic_impl(f, grid, x);
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_line: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_line: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

LinearFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("fit_loglog: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("trapezoid: size mismatch");
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

std::vector<double> log_spaced(double a, double b, std::size_t n) {
  if (!(a > 0.0) || !(b > a) || n < 2) throw InvalidArgument("log_spaced: need 0 < a < b, n >= 2");
  std::vector<double> out(n);
  const double la = std::log(a), lb = std::log(b);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = a;
  out.back() = b;
  return out;
}

std::vector<double> lin_spaced(double a, double b, std::size_t n) {
  if (n < 2) throw InvalidArgument("lin_spaced: n >= 2");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = b;
  return out;
}

}  // namespace lifespan

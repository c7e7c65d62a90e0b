#include "lifespan/mollifier.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "lifespan/error.hpp"

namespace lifespan {
namespace {

double raw_bump(double y) {
  const double q = 1.0 - y * y;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

double integrate_bump(double a, double b) {
  if (b <= a) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate([](double y) { return raw_bump(y); }, a, b);
}

}  // namespace

double bump_normalization() {
  static const double z = integrate_bump(-1.0, 1.0);
  return z;
}

double bump_density(double y) { return raw_bump(y) / bump_normalization(); }

double bump_cumulative(double y) {
  if (y <= -1.0) return 0.0;
  if (y >= 1.0) return 1.0;
  // Integrate over the shorter side for accuracy near either end.
  if (y <= 0.0) return integrate_bump(-1.0, y) / bump_normalization();
  return 1.0 - integrate_bump(y, 1.0) / bump_normalization();
}

Kernel bump_kernel(double delta, double spacing) {
  if (!(delta > 0.0) || !(spacing > 0.0)) {
    throw InvalidArgument("bump_kernel: delta and spacing must be positive");
  }
  if (delta < 3.0 * spacing) {
    throw ResolutionError("bump_kernel: delta = " + std::to_string(delta) +
                          " is under-resolved; need grid spacing <= " + std::to_string(delta / 3.0));
  }
  Kernel k;
  k.delta = delta;
  k.spacing = spacing;
  k.half = static_cast<std::size_t>(std::ceil(delta / spacing));
  const std::size_t width = 2 * k.half + 1;
  k.samples.resize(width);
  for (std::size_t i = 0; i < width; ++i) k.samples[i] = bump_density(k.offset(i) / delta) / delta;
  const double mass = std::accumulate(k.samples.begin(), k.samples.end(), 0.0) * spacing;
  k.normalization_defect = mass - 1.0;
  k.weights.resize(width);
  for (std::size_t i = 0; i < width; ++i) k.weights[i] = k.samples[i] * spacing / mass;
  return k;
}

std::vector<double> mollify(std::span<const double> f, const Kernel& kernel) {
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  const auto half = static_cast<std::ptrdiff_t>(kernel.half);
  std::vector<double> out(f.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    // (rho * f)(xi_i) = sum_m rho(xi_i - xi_m) f(xi_m) dxi; rho is even.
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
      const std::ptrdiff_t m = std::clamp<std::ptrdiff_t>(i + k, 0, n - 1);
      acc += kernel.weights[static_cast<std::size_t>(k + half)] * f[m];
    }
    out[i] = acc;
  }
  return out;
}

PowerAmplitude power_amplitude(std::span<const cplx> hat, std::span<const cplx> dhat, double p) {
  if (hat.size() != dhat.size()) throw InvalidArgument("power_amplitude: size mismatch");
  PowerAmplitude out;
  out.value.resize(hat.size());
  out.derivative.resize(hat.size());
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double r = std::abs(hat[i]);
    out.value[i] = std::pow(r, p - 1.0);
    if (r < 1e-300) {
      // |hat|^{p-2} -> 0 for p > 2; at p = 2 the one-sided slopes cancel.
      out.derivative[i] = 0.0;
      continue;
    }
    const cplx phase = std::conj(hat[i]) / r;
    out.derivative[i] = (p - 1.0) * std::pow(r, p - 2.0) * (phase * dhat[i]).real();
  }
  return out;
}

namespace {

double l2_samples(std::span<const double> f, double h) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(s * h);
}

}  // namespace

MollificationError mollification_error(std::span<const cplx> hat, std::span<const cplx> dhat,
                                       const XiGrid& grid, double p, double delta) {
  if (hat.size() != grid.count) throw InvalidArgument("mollification_error: grid mismatch");
  const PowerAmplitude g = power_amplitude(hat, dhat, p);
  const Kernel kernel = bump_kernel(delta, grid.spacing);
  // d/dxi (rho * g) = rho * g'.
  const std::vector<double> mg = mollify(g.value, kernel);
  const std::vector<double> mdg = mollify(g.derivative, kernel);
  std::vector<double> diff(hat.size()), ddiff(hat.size());
  for (std::size_t i = 0; i < hat.size(); ++i) {
    diff[i] = mg[i] - g.value[i];
    ddiff[i] = mdg[i] - g.derivative[i];
  }
  MollificationError e;
  e.delta = delta;
  e.l2_part = l2_samples(diff, grid.spacing);
  e.derivative_part = l2_samples(ddiff, grid.spacing);
  e.h1 = std::hypot(e.l2_part, e.derivative_part);
  return e;
}

double power_amplitude_h1(std::span<const cplx> hat, std::span<const cplx> dhat,
                          const XiGrid& grid, double p) {
  const PowerAmplitude g = power_amplitude(hat, dhat, p);
  return std::hypot(l2_samples(g.value, grid.spacing), l2_samples(g.derivative, grid.spacing));
}

std::vector<double> error_envelope(std::span<const double> deltas, std::span<const double> errors,
                                   double cap) {
  if (deltas.size() != errors.size()) throw InvalidArgument("error_envelope: size mismatch");
  std::vector<std::size_t> order(deltas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return deltas[a] < deltas[b]; });
  std::vector<double> out(deltas.size());
  double running = 0.0;
  for (std::size_t idx : order) {
    running = std::max(running, errors[idx]);
    out[idx] = std::min(cap, running);
  }
  return out;
}

}  // namespace lifespan

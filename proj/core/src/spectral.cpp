#include "lifespan/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "lifespan/error.hpp"

namespace lifespan {

Grid1D::Grid1D(double half_width, std::size_t n_points) : half_width_(half_width), n_(n_points) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw InvalidArgument("grid half_width must be positive and finite");
  }
  if (n_points < 4 || n_points % 2 != 0) {
    throw InvalidArgument("grid n_points must be an even integer >= 4");
  }
}

std::vector<double> Grid1D::positions() const {
  std::vector<double> x(n_);
  for (std::size_t j = 0; j < n_; ++j) x[j] = this->x(j);
  return x;
}

ComplexField::ComplexField(Grid1D g, double t) : grid(g), time(t), values(g.size()) {}

ComplexField::ComplexField(Grid1D g, double t, std::vector<cplx> v)
    : grid(g), time(t), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw InvalidArgument("field length " + std::to_string(values.size()) +
                          " does not match grid size " + std::to_string(grid.size()));
  }
}

bool ComplexField::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(),
                     [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

void ComplexField::require_finite(const char* where) const {
  if (!all_finite()) throw NonFiniteError(std::string(where) + ": field contains NaN or Inf");
}

namespace {

void require_same_grid(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid == b.grid)) throw InvalidArgument("fields live on different grids");
}

}  // namespace

ComplexField operator+(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b);
  ComplexField out(a.grid, a.time);
  for (std::size_t j = 0; j < a.size(); ++j) out.values[j] = a.values[j] + b.values[j];
  return out;
}

ComplexField operator-(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b);
  ComplexField out(a.grid, a.time);
  for (std::size_t j = 0; j < a.size(); ++j) out.values[j] = a.values[j] - b.values[j];
  return out;
}

ComplexField operator*(cplx s, const ComplexField& a) {
  ComplexField out(a.grid, a.time);
  for (std::size_t j = 0; j < a.size(); ++j) out.values[j] = s * a.values[j];
  return out;
}

SpectralOps::SpectralOps(const Grid1D& grid)
    : grid_(grid),
      plan_(FftPlan::for_size(grid.size())),
      x_(std::make_shared<const std::vector<double>>(grid.positions())) {
  std::vector<double> xi(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) xi[k] = grid.fft_frequency(k);
  xi_ = std::make_shared<const std::vector<double>>(std::move(xi));
}

Spectrum SpectralOps::fourier_transform(const ComplexField& field) const {
  field.require_finite("fourier_transform");
  if (!(field.grid == grid_)) throw InvalidArgument("fourier_transform: grid mismatch");
  const std::size_t n = grid_.size();
  std::vector<cplx> raw(n);
  plan_->forward(field.values, raw);
  // x_j = -L + j dx, so exp(-i x_j xi) = exp(i L xi) exp(-2 pi i jk/N).
  const double scale = kInvSqrtTwoPi * grid_.dx();
  const double L = grid_.half_width();
  Spectrum out{grid_, std::vector<cplx>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t bin = (k + n / 2) % n;
    const double xi = grid_.frequency(k);
    out.values[k] = scale * std::polar(1.0, L * xi) * raw[bin];
  }
  return out;
}

ComplexField SpectralOps::inverse_fourier_transform(const Spectrum& spectrum, double time) const {
  if (!(spectrum.grid == grid_)) throw InvalidArgument("inverse_fourier_transform: grid mismatch");
  const std::size_t n = grid_.size();
  const double L = grid_.half_width();
  std::vector<cplx> raw(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t bin = (k + n / 2) % n;
    raw[bin] = std::polar(1.0, -L * grid_.frequency(k)) * spectrum.values[k];
  }
  ComplexField out(grid_, time);
  plan_->backward(raw, out.values);
  const double scale = 1.0 / (kInvSqrtTwoPi * grid_.dx() * static_cast<double>(n));
  for (auto& v : out.values) v *= scale;
  return out;
}

ComplexField SpectralOps::free_propagate(const ComplexField& field, double t) const {
  field.require_finite("free_propagate");
  const std::size_t n = grid_.size();
  std::vector<cplx> hat(n);
  plan_->forward(field.values, hat);
  const auto& xi = *xi_;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) hat[k] *= std::polar(inv_n, -0.5 * t * xi[k] * xi[k]);
  ComplexField out(grid_, field.time + t);
  plan_->backward(hat, out.values);
  return out;
}

ComplexField SpectralOps::apply_M(const ComplexField& field, double t, int sign) const {
  if (t == 0.0) throw InvalidArgument("apply_M: t must be non-zero");
  if (sign != 1 && sign != -1) throw InvalidArgument("apply_M: sign must be +1 or -1");
  const auto& x = *x_;
  ComplexField out(grid_, field.time);
  const double c = static_cast<double>(sign) / (2.0 * t);
  for (std::size_t j = 0; j < field.size(); ++j) {
    out.values[j] = field.values[j] * std::polar(1.0, c * x[j] * x[j]);
  }
  return out;
}

ComplexField SpectralOps::derivative(const ComplexField& field, int order) const {
  if (order != 1 && order != 2) throw InvalidArgument("derivative: order must be 1 or 2");
  const std::size_t n = grid_.size();
  std::vector<cplx> hat(n);
  plan_->forward(field.values, hat);
  const auto& xi = *xi_;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (order == 1) {
      // The Nyquist bin has no odd-derivative partner.
      hat[k] = (k == n / 2) ? cplx{} : hat[k] * cplx(0.0, xi[k] * inv_n);
    } else {
      hat[k] *= -xi[k] * xi[k] * inv_n;
    }
  }
  ComplexField out(grid_, field.time);
  plan_->backward(hat, out.values);
  return out;
}

ComplexField SpectralOps::apply_J(const ComplexField& field, double t) const {
  const auto& x = *x_;
  ComplexField out(grid_, field.time);
  if (t == 0.0) {
    for (std::size_t j = 0; j < field.size(); ++j) out.values[j] = x[j] * field.values[j];
    return out;
  }
  const ComplexField d = derivative(field, 1);
  for (std::size_t j = 0; j < field.size(); ++j) {
    out.values[j] = x[j] * field.values[j] + cplx(0.0, t) * d.values[j];
  }
  return out;
}

ComplexField SpectralOps::apply_J_conjugated(const ComplexField& field, double t) const {
  if (!(t > 0.0)) throw InvalidArgument("apply_J_conjugated: t must be positive");
  ComplexField w = derivative(apply_M(field, t, -1), 1);
  for (auto& v : w.values) v *= cplx(0.0, t);
  return apply_M(w, t, +1);
}

namespace {

double l2_of(const std::vector<cplx>& v, double dx) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s * dx);
}

}  // namespace

double l2_norm(const ComplexField& field) { return l2_of(field.values, field.grid.dx()); }

double sup_norm(const ComplexField& field) {
  double m = 0.0;
  for (const auto& z : field.values) m = std::max(m, std::abs(z));
  return m;
}

NormReport SpectralOps::norms(const ComplexField& field, double t) const {
  field.require_finite("norms");
  const std::size_t n = grid_.size();
  const double dx = grid_.dx();
  const auto& x = *x_;
  const ComplexField d = derivative(field, 1);

  double s2 = 0.0, sd = 0.0, sx = 0.0, sj = 0.0, sup = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx u = field.values[j];
    const cplx xu = x[j] * u;
    s2 += std::norm(u);
    sd += std::norm(d.values[j]);
    sx += std::norm(xu);
    sj += std::norm(xu + cplx(0.0, t) * d.values[j]);
    sup = std::max(sup, std::abs(u));
  }
  NormReport r;
  r.l2 = r.l2_part = std::sqrt(s2 * dx);
  r.dx_part = std::sqrt(sd * dx);
  r.j_part = std::sqrt(sj * dx);
  r.l_inf = sup;
  r.h1 = std::sqrt(r.l2 * r.l2 + r.dx_part * r.dx_part);
  r.sigma = r.l2 + r.dx_part + std::sqrt(sx * dx);
  r.x_norm = r.l2_part + r.dx_part + r.j_part;
  return r;
}

double SpectralOps::boundary_ratio(const ComplexField& field) const {
  const std::size_t n = field.size();
  const std::size_t band = std::max<std::size_t>(2, n / 64);
  double edge = 0.0;
  for (std::size_t j = 0; j < band; ++j) {
    edge = std::max({edge, std::abs(field.values[j]), std::abs(field.values[n - 1 - j])});
  }
  const double peak = sup_norm(field);
  return peak > 0.0 ? edge / peak : 0.0;
}

void SpectralOps::check_boundary(const ComplexField& field, double tol, const char* where) const {
  const double r = boundary_ratio(field);
  if (r > tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, ": solution reached the periodic boundary (edge/peak = %.3e > %.1e at t = %.6g); ",
                  r, tol, field.time);
    throw DomainError(std::string(where) + buf + "enlarge half_width");
  }
}

double SpectralOps::top_octave_energy(const ComplexField& field) const {
  const std::size_t n = grid_.size();
  std::vector<cplx> hat(n);
  plan_->forward(field.values, hat);
  const auto& xi = *xi_;
  const double cut = 0.5 * grid_.nyquist();
  double total = 0.0, top = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = std::norm(hat[k]);
    total += e;
    if (std::abs(xi[k]) > cut) top += e;
  }
  return total > 0.0 ? top / total : 0.0;
}

Grid1D grid_for_horizon(double horizon, double xi_eff, double k_max, double min_half_width) {
  if (!(horizon >= 0.0) || !(xi_eff > 0.0) || !(k_max > 0.0)) {
    throw InvalidArgument("grid_for_horizon: horizon >= 0, xi_eff > 0, k_max > 0 required");
  }
  const double L = std::max(min_half_width, 8.0 + 4.0 * horizon * xi_eff);
  std::size_t n = 64;
  while (std::numbers::pi * static_cast<double>(n) / (2.0 * L) < k_max) n *= 2;
  return Grid1D(L, n);
}

}  // namespace lifespan

#include "lifespan/profile.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lifespan/error.hpp"
#include "lifespan/spectral.hpp"

namespace lifespan {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr cplx kI{0.0, 1.0};

// Transform of the unit-scale shape g and its derivative.
cplx unit_hat(ProfileKind kind, double z) {
  switch (kind) {
    case ProfileKind::gaussian:
      return std::exp(-0.5 * z * z);
    case ProfileKind::sech:
      return std::sqrt(kPi / 2.0) / std::cosh(kPi * z / 2.0);
    case ProfileKind::hermite1:
      return -kI * z * std::exp(-0.5 * z * z);
    case ProfileKind::sampled:
      break;
  }
  return {};
}

cplx unit_hat_derivative(ProfileKind kind, double z) {
  switch (kind) {
    case ProfileKind::gaussian:
      return -z * std::exp(-0.5 * z * z);
    case ProfileKind::sech: {
      const double a = kPi * z / 2.0;
      return -(kPi / 2.0) * std::sqrt(kPi / 2.0) * std::tanh(a) / std::cosh(a);
    }
    case ProfileKind::hermite1:
      return -kI * (1.0 - z * z) * std::exp(-0.5 * z * z);
    case ProfileKind::sampled:
      break;
  }
  return {};
}

double sampled_dx(const InitialProfile& prof) {
  return 2.0 * prof.sample_half_width / static_cast<double>(prof.samples.size());
}

// Refined maximum of a sampled unimodal peak at index k.
double parabolic_peak(double ym, double y0, double yp) {
  const double curv = ym - 2.0 * y0 + yp;
  if (curv >= 0.0) return y0;
  return y0 - (ym - yp) * (ym - yp) / (8.0 * curv);
}

}  // namespace

const char* to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::gaussian: return "gaussian";
    case ProfileKind::sech: return "sech";
    case ProfileKind::hermite1: return "hermite1";
    case ProfileKind::sampled: return "sampled";
  }
  return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& name) {
  if (name == "gaussian") return ProfileKind::gaussian;
  if (name == "sech") return ProfileKind::sech;
  if (name == "hermite1") return ProfileKind::hermite1;
  if (name == "sampled") return ProfileKind::sampled;
  throw InvalidArgument("unknown profile kind '" + name + "'");
}

InitialProfile InitialProfile::gaussian(double amplitude, double width, double center,
                                        double wavenumber) {
  InitialProfile p;
  p.kind = ProfileKind::gaussian;
  p.amplitude = amplitude;
  p.width = width;
  p.center = center;
  p.wavenumber = wavenumber;
  return p;
}

InitialProfile InitialProfile::sampled(double half_width, std::vector<cplx> values) {
  InitialProfile p;
  p.kind = ProfileKind::sampled;
  p.sample_half_width = half_width;
  p.samples = std::move(values);
  p.validate();
  return p;
}

void InitialProfile::validate() const {
  if (kind == ProfileKind::sampled) {
    if (!(sample_half_width > 0.0) || samples.size() < 8) {
      throw InvalidArgument("sampled profile needs half_width > 0 and at least 8 samples");
    }
    for (const auto& z : samples) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw NonFiniteError("sampled profile contains NaN or Inf");
      }
    }
    return;
  }
  if (!(width > 0.0) || !std::isfinite(amplitude) || !std::isfinite(center) ||
      !std::isfinite(wavenumber)) {
    throw InvalidArgument("profile: width must be positive and all parameters finite");
  }
}

cplx InitialProfile::value(double x) const {
  if (kind == ProfileKind::sampled) {
    const XiGrid g{-sample_half_width, sampled_dx(*this), samples.size()};
    return cubic_interpolate(std::span<const cplx>(samples), g, x);
  }
  const double y = (x - center) / width;
  double shape = 0.0;
  switch (kind) {
    case ProfileKind::gaussian: shape = std::exp(-0.5 * y * y); break;
    case ProfileKind::sech: shape = 1.0 / std::cosh(y); break;
    case ProfileKind::hermite1: shape = y * std::exp(-0.5 * y * y); break;
    case ProfileKind::sampled: break;
  }
  return amplitude * shape * std::polar(1.0, wavenumber * x);
}

cplx InitialProfile::hat(double xi) const {
  if (kind == ProfileKind::sampled) {
    const double dx = sampled_dx(*this);
    cplx acc{};
    for (std::size_t j = 0; j < samples.size(); ++j) {
      const double x = -sample_half_width + static_cast<double>(j) * dx;
      acc += std::polar(1.0, -x * xi) * samples[j];
    }
    return kInvSqrtTwoPi * dx * acc;
  }
  const double eta = xi - wavenumber;
  return amplitude * width * std::polar(1.0, -center * eta) * unit_hat(kind, width * eta);
}

cplx InitialProfile::hat_derivative(double xi) const {
  if (kind == ProfileKind::sampled) {
    const double dx = sampled_dx(*this);
    cplx acc{};
    for (std::size_t j = 0; j < samples.size(); ++j) {
      const double x = -sample_half_width + static_cast<double>(j) * dx;
      acc += x * std::polar(1.0, -x * xi) * samples[j];
    }
    return -kI * kInvSqrtTwoPi * dx * acc;
  }
  const double eta = xi - wavenumber;
  const double z = width * eta;
  return amplitude * width * std::polar(1.0, -center * eta) *
         (-kI * center * unit_hat(kind, z) + width * unit_hat_derivative(kind, z));
}

ComplexField InitialProfile::sample(const Grid1D& grid) const {
  ComplexField f(grid, 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) f.values[j] = value(grid.x(j));
  return f;
}

std::optional<double> InitialProfile::hat_sup_closed_form() const {
  const double scale = std::abs(amplitude) * width;
  switch (kind) {
    case ProfileKind::gaussian: return scale;
    case ProfileKind::sech: return scale * std::sqrt(kPi / 2.0);
    case ProfileKind::hermite1: return scale * std::exp(-0.5);
    case ProfileKind::sampled: return std::nullopt;
  }
  return std::nullopt;
}

namespace {

// Scan range for numeric searches over the transform.
double scan_half_range(const InitialProfile& prof) {
  if (prof.kind == ProfileKind::sampled) return kPi / sampled_dx(prof);
  return 60.0 / prof.width;
}

}  // namespace

double InitialProfile::hat_sup() const {
  if (auto c = hat_sup_closed_form()) return *c;
  const double half = scan_half_range(*this);
  const std::size_t n = 8001;
  const double h = 2.0 * half / static_cast<double>(n - 1);
  std::size_t best = 0;
  double best_val = -1.0;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = std::abs(hat(wavenumber - half + static_cast<double>(i) * h));
    if (v[i] > best_val) {
      best_val = v[i];
      best = i;
    }
  }
  if (best == 0 || best == n - 1) return best_val;
  // Brent's method on the bracketing cell pins the peak to double precision.
  const double lo = wavenumber - half + static_cast<double>(best - 1) * h;
  const auto [xi_star, neg] = boost::math::tools::brent_find_minima(
      [this](double xi) { return -std::abs(hat(xi)); }, lo, lo + 2.0 * h, std::numeric_limits<double>::digits / 2);
  (void)xi_star;
  return std::max(best_val, -neg);
}

double InitialProfile::xi_cutoff(double rel) const {
  const double sup = hat_sup();
  if (sup == 0.0) return 1.0;
  const double half = scan_half_range(*this);
  const double h = std::min(0.01 / width, half / 4000.0);
  double last = 0.0;
  for (double eta = 0.0; eta <= half; eta += h) {
    if (std::abs(hat(wavenumber + eta)) >= rel * sup || std::abs(hat(wavenumber - eta)) >= rel * sup) {
      last = eta;
    }
  }
  return last + 10.0 * h;
}

double InitialProfile::spectral_radius(double fraction) const {
  const double reach = std::abs(wavenumber) + xi_cutoff(1e-17);
  const std::size_t n = 20001;
  const double h = reach / static_cast<double>(n - 1);
  std::vector<double> r(n), cum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = static_cast<double>(i) * h;
    r[i] = std::norm(hat(xi)) + (i > 0 ? std::norm(hat(-xi)) : 0.0);
  }
  for (std::size_t i = 1; i < n; ++i) cum[i] = cum[i - 1] + 0.5 * h * (r[i] + r[i - 1]);
  const double total = cum.back();
  if (total == 0.0) return 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (cum[i] >= fraction * total) return static_cast<double>(i) * h;
  }
  return reach;
}

std::string InitialProfile::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind == ProfileKind::sampled) {
    os << "(n=" << samples.size() << ", L=" << sample_half_width << ")";
  } else {
    os << "(a=" << amplitude << ", w=" << width << ", c=" << center << ", k=" << wavenumber << ")";
  }
  return os.str();
}

double ModelParams::delta_value() const { return delta ? *delta : std::pow(epsilon, 0.25); }

void ModelParams::validate() const {
  if (!(p >= 2.0) || !(p <= 3.0 - 1e-6)) {
    throw InvalidArgument("p must satisfy 2 <= p <= 3 - 1e-6 (got " + std::to_string(p) + ")");
  }
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) {
    throw InvalidArgument("lambda must be finite");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be positive");
  if (!(delta_value() > 0.0)) throw InvalidArgument("delta must be positive");
  if (B && !(*B > 0.0)) throw InvalidArgument("B must be positive");
  if (!B && !(B_over_A > 0.0 && B_over_A < 1.0)) {
    throw InvalidArgument("B_over_A must lie in (0, 1)");
  }
  profile.validate();
}

double blowup_constant_A(double p, cplx lambda, double hat_sup) {
  const double inv = (p - 1.0) * lambda.imag() * std::pow(hat_sup, p - 1.0);
  return inv > 0.0 ? 1.0 / inv : kInf;
}

double blowup_constant_A(const ModelParams& params) {
  return blowup_constant_A(params.p, params.lambda, params.profile.hat_sup());
}

double sup_hat_on_grid(const InitialProfile& profile, const SpectralOps& ops, double tail_tol) {
  const ComplexField phi = profile.sample(ops.grid());
  const double tail = ops.top_octave_energy(phi);
  if (tail > tail_tol) {
    throw ResolutionError("hat phi is not resolved: top-octave energy fraction " +
                          std::to_string(tail) + " exceeds " + std::to_string(tail_tol));
  }
  const Spectrum s = ops.fourier_transform(phi);
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.values.size(); ++k) {
    if (std::abs(s.values[k]) > std::abs(s.values[best])) best = k;
  }
  if (best == 0 || best + 1 == s.values.size()) return std::abs(s.values[best]);
  return parabolic_peak(std::abs(s.values[best - 1]), std::abs(s.values[best]),
                        std::abs(s.values[best + 1]));
}

double blowup_constant_A(const ModelParams& params, const SpectralOps& ops, double tail_tol) {
  return blowup_constant_A(params.p, params.lambda, sup_hat_on_grid(params.profile, ops, tail_tol));
}

double profile_horizon(const ModelParams& params) {
  if (params.B) return *params.B;
  return params.B_over_A * blowup_constant_A(params);
}

double s_of_t(double t, double p, double epsilon) {
  if (t < 0.0) throw InvalidArgument("s_of_t: t must be non-negative");
  return 2.0 * std::pow(epsilon, p - 1.0) * std::pow(t, (3.0 - p) / 2.0) / (3.0 - p);
}

double t_of_s(double s, double p, double epsilon) {
  if (s < 0.0) throw InvalidArgument("t_of_s: s must be non-negative");
  return std::pow((3.0 - p) * s / (2.0 * std::pow(epsilon, p - 1.0)), 2.0 / (3.0 - p));
}

ProfileModel::ProfileModel(const ModelParams& params, double spacing, bool mollified)
    : params_(params), mollified_(mollified) {
  params_.validate();
  const double reach = params_.profile.xi_cutoff(1e-17) + (mollified ? params_.delta_value() : 0.0);
  grid_ = XiGrid::symmetric(params_.profile.wavenumber, reach, spacing);
  build();
}

ProfileModel::ProfileModel(const ModelParams& params, const XiGrid& grid, bool mollified)
    : params_(params), grid_(grid), mollified_(mollified) {
  params_.validate();
  build();
}

void ProfileModel::build() {
  if (grid_.count < 8) throw InvalidArgument("ProfileModel: frequency grid needs >= 8 points");
  A_ = blowup_constant_A(params_);
  B_ = params_.B ? *params_.B : params_.B_over_A * A_;
  if (std::isfinite(A_) && B_ >= A_) {
    throw InvalidArgument("profile horizon B must be below A (B = " + std::to_string(B_) +
                          ", A = " + std::to_string(A_) + ")");
  }
  const std::size_t n = grid_.count;
  hat_.resize(n);
  dhat_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    hat_[i] = params_.profile.hat(grid_.at(i));
    dhat_[i] = params_.profile.hat_derivative(grid_.at(i));
  }
  const PowerAmplitude g = power_amplitude(hat_, dhat_, params_.p);
  amplitude_ = g.value;
  if (mollified_) {
    mollified_amplitude_ = mollify(amplitude_, bump_kernel(params_.delta_value(), grid_.spacing));
  } else {
    mollified_amplitude_ = amplitude_;
  }
}

void ProfileModel::check_range(double s) const {
  if (!(s >= 0.0)) throw InvalidArgument("profile evaluation needs s >= 0");
  if (s > B_ * (1.0 + 1e-12)) {
    const auto it = std::max_element(mollified_amplitude_.begin(), mollified_amplitude_.end());
    const double xi = grid_.at(static_cast<std::size_t>(it - mollified_amplitude_.begin()));
    throw BlowupError("profile evaluated beyond the horizon B (s = " + std::to_string(s) +
                          ", B = " + std::to_string(B_) + ")",
                      xi);
  }
}

std::vector<double> ProfileModel::w_of(double s) const {
  const double c = (params_.p - 1.0) * params_.lambda.imag() * s;
  std::vector<double> w(grid_.count);
  for (std::size_t i = 0; i < grid_.count; ++i) {
    w[i] = 1.0 - c * mollified_amplitude_[i];
    if (w[i] < kWFloor) {
      throw BlowupError("W dropped below the blow-up floor at xi = " + std::to_string(grid_.at(i)),
                        grid_.at(i));
    }
  }
  return w;
}

std::vector<double> ProfileModel::g_of(double s, std::span<const double> w) const {
  const double p = params_.p;
  const double re = params_.lambda.real();
  const double im = params_.lambda.imag();
  std::vector<double> g(grid_.count);
  for (std::size_t i = 0; i < grid_.count; ++i) {
    const double a = mollified_amplitude_[i];
    const double c = (p - 1.0) * im * a;
    // int_0^s W^{-1} = -log W(s) / c, written with log1p for small c s.
    const double integral = (c != 0.0) ? -std::log1p(-c * s) / c : s;
    (void)w;
    g[i] = -re * a * integral - kPi / 4.0;
  }
  return g;
}

ProfileEval ProfileModel::eval(double s) const {
  check_range(s);
  const double p = params_.p;
  const cplx lam = params_.lambda;
  ProfileEval e;
  e.s = s;
  e.grid = grid_;
  e.W = w_of(s);
  e.G = g_of(s, e.W);
  const std::size_t n = grid_.count;
  e.V.resize(n);
  e.dsV.resize(n);
  e.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx phase = std::polar(1.0, e.G[i]);
    const double w1 = std::pow(e.W[i], -1.0 / (p - 1.0));
    const double wp = w1 / e.W[i];  // W^{-p/(p-1)}
    e.V[i] = w1 * phase * hat_[i];
    e.dsV[i] = -kI * lam * mollified_amplitude_[i] * wp * phase * hat_[i];
    e.residual[i] = lam * wp * phase * hat_[i] * (mollified_amplitude_[i] - amplitude_[i]);
  }
  e.dV = fd_derivative(std::span<const cplx>(e.V), grid_.spacing, 1);
  e.d2V = fd_derivative(std::span<const cplx>(e.V), grid_.spacing, 2);
  return e;
}

std::vector<cplx> ProfileModel::phase_factor(double s, double power) const {
  check_range(s);
  const auto w = w_of(s);
  const auto g = g_of(s, w);
  std::vector<cplx> out(grid_.count);
  for (std::size_t i = 0; i < grid_.count; ++i) {
    out[i] = std::pow(w[i], -power / (params_.p - 1.0)) * std::polar(1.0, g[i]);
  }
  return out;
}

std::vector<cplx> ProfileModel::phase_factor_ds(double s) const {
  auto f = phase_factor(s, 1.0);
  const auto w = w_of(s);
  for (std::size_t i = 0; i < grid_.count; ++i) {
    f[i] *= -kI * params_.lambda * mollified_amplitude_[i] / w[i];
  }
  return f;
}

namespace {

cplx ode_rhs(cplx v, double p, cplx lambda) {
  return -kI * lambda * std::pow(std::abs(v), p - 1.0) * v;
}

// Integrates from s = 0 through the ascending checkpoints with roughly n
// uniform steps over [0, s_max].
std::vector<cplx> rk4_run(cplx v0, std::span<const double> s_points, std::size_t n, double p,
                          cplx lambda) {
  std::vector<cplx> out;
  out.reserve(s_points.size());
  const double s_max = s_points.back();
  cplx v = v0;
  double s = 0.0;
  for (double target : s_points) {
    const double span = target - s;
    const auto steps = std::max<std::size_t>(
        span > 0.0 ? 1 : 0,
        static_cast<std::size_t>(std::ceil(static_cast<double>(n) * span / s_max)));
    const double h = steps > 0 ? span / static_cast<double>(steps) : 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      const cplx k1 = ode_rhs(v, p, lambda);
      const cplx k2 = ode_rhs(v + 0.5 * h * k1, p, lambda);
      const cplx k3 = ode_rhs(v + 0.5 * h * k2, p, lambda);
      const cplx k4 = ode_rhs(v + h * k3, p, lambda);
      v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    s = target;
    out.push_back(v);
  }
  return out;
}

std::vector<cplx> rk4_converged(cplx v0, std::span<const double> s_points, double p, cplx lambda,
                                double tol) {
  if (s_points.back() == 0.0) return std::vector<cplx>(s_points.size(), v0);
  std::size_t n = 32;
  auto coarse = rk4_run(v0, s_points, n, p, lambda);
  constexpr std::size_t kMaxSteps = std::size_t{1} << 22;
  while (n < kMaxSteps) {
    n *= 2;
    auto fine = rk4_run(v0, s_points, n, p, lambda);
    double diff = 0.0;
    for (std::size_t k = 0; k < fine.size(); ++k) diff = std::max(diff, std::abs(fine[k] - coarse[k]));
    if (diff < tol) return fine;
    coarse = std::move(fine);
  }
  throw ConvergenceError("rk4_oracle: step-size underflow near blow-up (no convergence with " +
                         std::to_string(kMaxSteps) + " steps)");
}

}  // namespace

std::vector<std::vector<cplx>> rk4_oracle(std::span<const double> s_points, const ModelParams& params,
                                          const XiGrid& grid, double tol) {
  params.validate();
  if (s_points.empty()) return {};
  if (!std::is_sorted(s_points.begin(), s_points.end()) || s_points.front() < 0.0) {
    throw InvalidArgument("rk4_oracle: s points must be ascending and non-negative");
  }
  const double A = blowup_constant_A(params);
  if (std::isfinite(A) && !(s_points.back() < A * (1.0 - 1e-3))) {
    throw InvalidArgument("rk4_oracle: s_end must stay below A (1 - 1e-3)");
  }
  const cplx rot = std::polar(1.0, -kPi / 4.0);
  std::vector<std::vector<cplx>> out(s_points.size(), std::vector<cplx>(grid.count));
  for (std::size_t i = 0; i < grid.count; ++i) {
    const cplx v0 = rot * params.profile.hat(grid.at(i));
    const auto v = rk4_converged(v0, s_points, params.p, params.lambda, tol);
    for (std::size_t k = 0; k < s_points.size(); ++k) out[k][i] = v[k];
  }
  return out;
}

std::vector<cplx> rk4_oracle(double s_end, const ModelParams& params, const XiGrid& grid, double tol) {
  const double pts[] = {s_end};
  return rk4_oracle(pts, params, grid, tol).front();
}

cplx rk4_scalar(cplx v0, double s_end, double p, cplx lambda, double tol) {
  if (s_end < 0.0) throw InvalidArgument("rk4_scalar: s_end must be non-negative");
  const double pts[] = {s_end};
  return rk4_converged(v0, pts, p, lambda, tol).front();
}

ProfileResidual profile_residual(const ProfileModel& model, double s, double h) {
  if (!(h > 0.0) || s < h) throw InvalidArgument("profile_residual: need 0 < h <= s");
  const ProfileEval mid = model.eval(s);
  const ProfileEval lo = model.eval(s - h);
  const ProfileEval hi = model.eval(s + h);
  const double p = model.params().p;
  const cplx lam = model.params().lambda;
  ProfileResidual r;
  r.rhs = mid.residual;
  r.lhs.resize(mid.V.size());
  for (std::size_t i = 0; i < mid.V.size(); ++i) {
    const cplx ds = (hi.V[i] - lo.V[i]) / (2.0 * h);
    const cplx v = mid.V[i];
    r.lhs[i] = kI * ds - lam * std::pow(std::abs(v), p - 1.0) * v;
    r.max_gap = std::max(r.max_gap, std::abs(r.lhs[i] - r.rhs[i]));
  }
  return r;
}

}  // namespace lifespan

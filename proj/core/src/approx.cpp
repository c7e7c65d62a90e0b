#include "lifespan/approx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lifespan/error.hpp"
#include "lifespan/mollifier.hpp"

namespace lifespan {
namespace {

constexpr cplx kI{0.0, 1.0};

ComplexField zero_field(const Grid1D& g, double t) { return ComplexField(g, t); }

// Samples of a frequency-grid function at xi = x / t, times the factor
// scale * exp(i x^2 / (2t)).
ComplexField chirped_samples(const ApproxContext& ctx, std::span<const cplx> f, double t,
                             double scale) {
  const Grid1D& g = ctx.grid();
  const XiGrid& xg = ctx.model().grid();
  ComplexField out(g, t);
  const auto& x = ctx.ops().positions();
  for (std::size_t j = 0; j < g.size(); ++j) {
    const cplx v = cubic_interpolate(f, xg, x[j] / t);
    if (v == cplx{}) continue;
    out.values[j] = scale * std::polar(1.0, x[j] * x[j] / (2.0 * t)) * v;
  }
  return out;
}

void require_time(const ApproxContext& ctx, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("approximate solution needs t >= 0");
  if (t > ctx.T_B() * (1.0 + 1e-12)) {
    throw BlowupError("t = " + std::to_string(t) + " is beyond T_B = " + std::to_string(ctx.T_B()),
                      0.0);
  }
}

double x_norm(const ApproxContext& ctx, const ComplexField& f, double t) {
  return ctx.ops().norms(f, t).x_norm;
}

}  // namespace

double cutoff_chi(double tau) {
  if (tau <= 1.0) return 1.0;
  if (tau >= 2.0) return 0.0;
  return 1.0 - bump_cumulative(2.0 * tau - 3.0);
}

double cutoff_chi_derivative(double tau) {
  if (tau <= 1.0 || tau >= 2.0) return 0.0;
  return -2.0 * bump_density(2.0 * tau - 3.0);
}

const char* to_string(Region r) {
  switch (r) {
    case Region::free: return "free";
    case Region::blend: return "blend";
    case Region::profile: return "profile";
  }
  return "unknown";
}

Grid1D approx_grid(const ModelParams& params, double xi_rel) {
  params.validate();
  const InitialProfile& prof = params.profile;
  const double cut = prof.xi_cutoff(xi_rel) + params.delta_value();
  const double reach = std::abs(prof.wavenumber) + cut;
  const double T_B = t_of_s(profile_horizon(params), params.p, params.epsilon);
  if (!std::isfinite(T_B)) throw InvalidArgument("approx_grid: profile horizon must be finite");
  const double extent = (prof.kind == ProfileKind::sampled) ? prof.sample_half_width
                                                            : std::abs(prof.center) + 12.0 * prof.width;
  const double L = std::max(32.0, extent + 1.05 * reach * T_B);
  const double dx_max = std::numbers::pi / (1.3 * reach);
  std::size_t n = 64;
  while (2.0 * L / static_cast<double>(n) > dx_max) n *= 2;
  return Grid1D(L, n);
}

ApproxContext::ApproxContext(const ModelParams& params, const ApproxOptions& options)
    : model_(nullptr),
      ops_(options.grid ? *options.grid : approx_grid(params, options.xi_rel)),
      initial_(ops_.grid()),
      T_B_(0.0) {
  params.validate();
  if (!(params.epsilon < 1.0)) {
    throw InvalidArgument("approximate solution requires eps < 1 (the blend region (1/eps, 2/eps) must lie in t > 1)");
  }
  const double B = profile_horizon(params);
  if (!std::isfinite(B)) {
    throw InvalidArgument("approximate solution needs a finite profile horizon; set B when Im(lambda) <= 0");
  }
  const InitialProfile& prof = params.profile;
  const double reach = prof.xi_cutoff(options.xi_rel) + (options.mollified ? params.delta_value() : 0.0);
  const XiGrid xg = XiGrid::symmetric(prof.wavenumber, reach, options.xi_spacing);
  model_ = std::make_shared<const ProfileModel>(params, xg, options.mollified);
  T_B_ = t_of_s(model_->B(), params.p, params.epsilon);
  initial_ = initial_field(params, ops_.grid());
}

Region ApproxContext::region(double t) const {
  const double et = epsilon() * t;
  if (et <= 1.0) return Region::free;
  if (et < 2.0) return Region::blend;
  return Region::profile;
}

ComplexField ApproxContext::free_wave(double t) const {
  ComplexField u = ops_.free_propagate(initial_, t);
  u.time = t;
  return u;
}

ComplexField ApproxContext::modified_profile(double t) const {
  if (!(t > 1.0)) throw InvalidArgument("m(t) is defined for t > 1");
  require_time(*this, t);
  const ModelParams& p = params();
  const double s = std::min(s_of_t(t, p.p, p.epsilon), model_->B());
  const ProfileEval e = model_->eval(s);
  return chirped_samples(*this, e.V, t, p.epsilon / std::sqrt(t));
}

ComplexField nonlinearity(const ComplexField& u, const ModelParams& params) {
  ComplexField out(u.grid, u.time);
  for (std::size_t j = 0; j < u.size(); ++j) {
    const cplx v = u.values[j];
    out.values[j] = params.lambda * std::pow(std::abs(v), params.p - 1.0) * v;
  }
  return out;
}

ComplexField modified_profile_m(const ApproxContext& ctx, double t) { return ctx.modified_profile(t); }

ApproxState approx_solution_ua(const ApproxContext& ctx, double t) {
  require_time(ctx, t);
  const double eps = ctx.epsilon();
  const Region region = ctx.region(t);
  ComplexField u_free = ctx.free_wave(t);
  ComplexField m = region == Region::free ? zero_field(ctx.grid(), t) : ctx.modified_profile(t);
  const double chi = cutoff_chi(eps * t);
  const double chi_dot = eps * cutoff_chi_derivative(eps * t);
  ComplexField u_a(ctx.grid(), t);
  switch (region) {
    case Region::free: u_a = u_free; break;
    case Region::profile: u_a = m; break;
    case Region::blend:
      for (std::size_t j = 0; j < u_a.size(); ++j) {
        u_a.values[j] = chi * u_free.values[j] + (1.0 - chi) * m.values[j];
      }
      break;
  }
  u_a.time = t;
  return ApproxState{t, region, chi, chi_dot, std::move(u_free), std::move(m), std::move(u_a),
                     std::nullopt, std::nullopt, std::nullopt};
}

void profile_remainders(const ApproxContext& ctx, double t, ComplexField& Q1, ComplexField& Q2) {
  if (!(t > 1.0)) throw InvalidArgument("profile remainders are defined for t > 1");
  require_time(ctx, t);
  const ModelParams& p = ctx.params();
  const double s = std::min(s_of_t(t, p.p, p.epsilon), ctx.model().B());
  const ProfileEval e = ctx.model().eval(s);
  // Q1 = eps^p t^{-p/2} M(t) [i d_s V - N(V)](s, x/t)
  Q1 = chirped_samples(ctx, e.residual, t, std::pow(p.epsilon, p.p) * std::pow(t, -0.5 * p.p));
  // Q2 = eps M(t) / (2 t^{5/2}) d_xi^2 V(s, x/t)
  Q2 = chirped_samples(ctx, e.d2V, t, p.epsilon / (2.0 * std::pow(t, 2.5)));
}

ApproxState residual_R(const ApproxContext& ctx, double t) {
  ApproxState st = approx_solution_ua(ctx, t);
  const ModelParams& p = ctx.params();
  ComplexField R(ctx.grid(), t);
  if (st.region == Region::free) {
    R = nonlinearity(st.u_free, p);
    for (auto& v : R.values) v = -v;
  } else {
    ComplexField Q1(ctx.grid(), t), Q2(ctx.grid(), t);
    profile_remainders(ctx, t, Q1, Q2);
    if (st.region == Region::profile) {
      for (std::size_t j = 0; j < R.size(); ++j) R.values[j] = Q1.values[j] + Q2.values[j];
    } else {
      const ComplexField Nm = nonlinearity(st.m, p);
      const ComplexField Na = nonlinearity(st.u_a, p);
      const double chi = st.chi;
      for (std::size_t j = 0; j < R.size(); ++j) {
        R.values[j] = kI * st.chi_dot * (st.u_free.values[j] - st.m.values[j]) +
                      (1.0 - chi) * (Nm.values[j] - Na.values[j]) - chi * Na.values[j] +
                      (1.0 - chi) * (Q1.values[j] + Q2.values[j]);
      }
    }
    st.Q1 = std::move(Q1);
    st.Q2 = std::move(Q2);
  }
  R.time = t;
  st.R = std::move(R);
  return st;
}

ComplexField residual_fd(const ApproxContext& ctx, double t, double h) {
  if (!(h > 0.0)) throw InvalidArgument("residual_fd: h must be positive");
  if (t - 2.0 * h <= 0.0) throw InvalidArgument("residual_fd: need t > 2h");
  const auto ua = [&](double tt) { return approx_solution_ua(ctx, tt).u_a; };
  const ComplexField m2 = ua(t - 2.0 * h);
  const ComplexField m1 = ua(t - h);
  const ComplexField p1 = ua(t + h);
  const ComplexField p2 = ua(t + 2.0 * h);
  const ComplexField u = ua(t);
  const ComplexField uxx = ctx.ops().derivative(u, 2);
  const ComplexField Nu = nonlinearity(u, ctx.params());
  ComplexField out(ctx.grid(), t);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const cplx dt = (m2.values[j] - 8.0 * m1.values[j] + 8.0 * p1.values[j] - p2.values[j]) / (12.0 * h);
    out.values[j] = kI * dt + 0.5 * uxx.values[j] - Nu.values[j];
  }
  return out;
}

ResidualConsistency residual_consistency(const ApproxContext& ctx, double t, double h,
                                         std::size_t levels) {
  if (levels < 2) throw InvalidArgument("residual_consistency: need at least two step levels");
  ResidualConsistency rc;
  rc.t = t;
  rc.region = ctx.region(t);
  const ComplexField R = *residual_R(ctx, t).R;
  rc.R_x_norm = x_norm(ctx, R, t);
  for (std::size_t k = 0; k < levels; ++k) {
    const double step = h / std::pow(2.0, static_cast<double>(k));
    const ComplexField fd = residual_fd(ctx, t, step);
    rc.steps.push_back(step);
    rc.rel_gaps.push_back(x_norm(ctx, R - fd, t) / rc.R_x_norm);
  }
  for (std::size_t k = 1; k < levels; ++k) {
    rc.orders.push_back(std::log2(rc.rel_gaps[k - 1] / rc.rel_gaps[k]));
  }
  return rc;
}

MatchingGap matching_gap(const ApproxContext& ctx, double t) {
  const double eps = ctx.epsilon();
  if (!(t > 1.0 / eps && t < 2.0 / eps)) {
    throw InvalidArgument("matching_gap: t must lie in the blend region (1/eps, 2/eps)");
  }
  const ComplexField diff = ctx.free_wave(t) - ctx.modified_profile(t);
  MatchingGap g;
  g.t = t;
  g.gap = ctx.ops().norms(diff, t);
  const double p = ctx.params().p;
  g.f1_budget = std::pow(eps, p) * std::pow(t, 0.5 * (3.0 - p));
  g.f2_budget = eps / t;
  return g;
}

namespace {

std::vector<double> ladder(double a, double b, std::size_t n, bool with_zero, double t_min) {
  if (with_zero) {
    std::vector<double> v{0.0};
    const auto rest = log_spaced(std::min(t_min, 0.5 * b), b, n - 1);
    v.insert(v.end(), rest.begin(), rest.end());
    return v;
  }
  return log_spaced(a, b, n);
}

double trapezoid_sum(const std::vector<double>& t, const std::vector<double>& y) {
  return trapezoid(t, y);
}

RegionIntegral integrate_region(const ApproxContext& ctx, Region region, double a, double b,
                                const BudgetOptions& opt) {
  RegionIntegral ri;
  ri.region = region;
  ri.t0 = a;
  ri.t1 = b;
  const bool with_zero = region == Region::free;
  const auto norm_at = [&](double t) { return x_norm(ctx, *residual_R(ctx, t).R, t); };

  std::size_t n = std::max<std::size_t>(opt.nodes, 3);
  std::vector<double> times = ladder(a, b, n, with_zero, opt.t_min);
  std::vector<double> vals(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) vals[i] = norm_at(times[i]);
  double prev = trapezoid_sum(times, vals);

  for (std::size_t d = 0; d < opt.max_doublings; ++d) {
    // The refined ladder contains the previous nodes at even positions
    // (after the leading zero in the free region).
    const std::size_t offset = with_zero ? 1 : 0;
    const std::size_t m = times.size() - offset;
    const std::size_t m2 = 2 * m - 1;
    std::vector<double> t2 = ladder(a, b, m2 + offset, with_zero, opt.t_min);
    std::vector<double> v2(t2.size());
    if (with_zero) v2[0] = vals[0];
    for (std::size_t i = 0; i < m2; ++i) {
      v2[offset + i] = (i % 2 == 0) ? vals[offset + i / 2] : norm_at(t2[offset + i]);
    }
    const double cur = trapezoid_sum(t2, v2);
    times = std::move(t2);
    vals = std::move(v2);
    if (std::abs(cur - prev) <= opt.rel_tol * std::abs(cur)) {
      ri.value = cur;
      ri.nodes = times.size();
      ri.times = std::move(times);
      ri.norms = std::move(vals);
      return ri;
    }
    prev = cur;
  }
  std::ostringstream os;
  os << "residual_budget: " << to_string(region) << " integral not stable to " << opt.rel_tol
     << " after " << opt.max_doublings << " doublings; nodes (t, ||R||_X):";
  for (std::size_t i = 0; i < times.size(); ++i) os << " (" << times[i] << ", " << vals[i] << ")";
  throw ConvergenceError(os.str());
}

}  // namespace

ResidualBudget residual_budget(const ApproxContext& ctx, const BudgetOptions& options) {
  const double eps = ctx.epsilon();
  ResidualBudget out;
  out.epsilon = eps;
  out.T_B = ctx.T_B();
  const double t1 = std::min(1.0 / eps, ctx.T_B());
  out.regions.push_back(integrate_region(ctx, Region::free, 0.0, t1, options));
  out.I_free = out.regions.back().value;
  if (ctx.T_B() > 1.0 / eps) {
    out.regions.push_back(
        integrate_region(ctx, Region::blend, 1.0 / eps, std::min(2.0 / eps, ctx.T_B()), options));
    out.I_blend = out.regions.back().value;
  }
  if (ctx.T_B() > 2.0 / eps) {
    out.regions.push_back(integrate_region(ctx, Region::profile, 2.0 / eps, ctx.T_B(), options));
    out.I_profile = out.regions.back().value;
  }
  out.I_total = out.I_free + out.I_blend + out.I_profile;
  return out;
}

BootstrapGap bootstrap_gap(const ApproxContext& ctx, const Trajectory& trajectory) {
  BootstrapGap out;
  const double eps = ctx.epsilon();
  for (const auto& rec : trajectory.records) {
    if (!rec.field) throw InvalidArgument("bootstrap_gap: trajectory was recorded without fields");
    if (!(rec.field->grid == ctx.grid())) {
      throw InvalidArgument("bootstrap_gap: trajectory grid differs from the approximation grid");
    }
    if (rec.t > ctx.T_B()) break;
    const ComplexField ua = approx_solution_ua(ctx, rec.t).u_a;
    const double g = x_norm(ctx, ua - *rec.field, rec.t);
    out.times.push_back(rec.t);
    out.gap.push_back(g);
    out.gap_over_eps.push_back(g / eps);
    out.max_gap_over_eps = std::max(out.max_gap_over_eps, g / eps);
    if (g > 0.5 * eps) out.within_half = false;
  }
  return out;
}

}  // namespace lifespan

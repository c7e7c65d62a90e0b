#include "lifespan/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lifespan/error.hpp"

namespace lifespan {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sup_abs(const ComplexField& f) { return sup_norm(f); }

struct Crossing {
  ComplexField before;
  double t_before;
  double dt;
};

struct RunResult {
  Trajectory traj;
  std::optional<Crossing> crossing;
};

TrajectoryRecord make_record(const ComplexField& u, double t, const SolverConfig& cfg,
                             const SpectralOps& ops) {
  TrajectoryRecord r;
  r.t = t;
  r.norms = ops.norms(u, t);
  r.mass = mass(u);
  r.power_integral = power_integral(u, cfg.params.p + 1.0);
  if (cfg.keep_fields) r.field = u;
  return r;
}

RunResult run(const SolverConfig& cfg, const SpectralOps& ops) {
  RunResult out;
  Trajectory& traj = out.traj;

  std::vector<double> recs;
  for (double r : cfg.record_times) {
    if (r >= 0.0 && r <= cfg.t_end) recs.push_back(r);
  }
  std::sort(recs.begin(), recs.end());
  recs.erase(std::unique(recs.begin(), recs.end()), recs.end());
  std::size_t next = 0;

  ComplexField u = initial_field(cfg.params, cfg.grid);
  u.require_finite("initial data");
  traj.initial_sup = sup_abs(u);
  const double threshold = cfg.amp_blowup_factor * traj.initial_sup;
  double t = 0.0;

  auto record_if_due = [&]() {
    if (next < recs.size() && recs[next] <= t && cfg.boundary_tol > 0.0) {
      ops.check_boundary(u, cfg.boundary_tol, "evolve");
    }
    while (next < recs.size() && recs[next] <= t) {
      traj.records.push_back(make_record(u, t, cfg, ops));
      ++next;
    }
  };
  record_if_due();

  traj.termination = Termination::reached_t_end;
  while (t < cfg.t_end) {
    double dt = adaptive_dt(cfg, sup_abs(u));
    if (dt < cfg.dt_floor) {
      traj.termination = Termination::dt_underflow;
      out.crossing = Crossing{u, t, dt};
      break;
    }
    double target = cfg.t_end;
    if (next < recs.size()) target = std::min(target, recs[next]);
    bool lands = false;
    if (t + dt >= target) {
      dt = target - t;
      lands = true;
    }

    std::optional<StepResult> accepted;
    while (true) {
      StepResult res = strang_step(u, dt, cfg.params, ops);
      if (!res.blowup_x) {
        accepted = std::move(res);
        break;
      }
      ++traj.rejected_steps;
      dt *= 0.5;
      lands = false;
      if (dt < cfg.dt_floor) break;
    }
    if (!accepted) {
      traj.termination = Termination::blowup_w_floor;
      out.crossing = Crossing{u, t, 2.0 * dt};
      break;
    }
    accepted->field.require_finite("evolve");
    ++traj.steps;

    if (sup_abs(accepted->field) >= threshold) {
      traj.termination = Termination::blowup_amplitude;
      out.crossing = Crossing{u, t, dt};
      break;
    }
    t = lands ? target : t + dt;
    u = std::move(accepted->field);
    u.time = t;
    record_if_due();
  }
  traj.t_final = t;
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  params.validate();
  if (!(dt_initial > 0.0) || !(dt_floor > 0.0) || !(dt_floor < dt_initial)) {
    throw InvalidArgument("solver: need 0 < dt_floor < dt_initial");
  }
  if (!(amp_blowup_factor > 1.0)) throw InvalidArgument("solver: K_b must exceed 1");
  if (!(tau_scale >= 0.0)) throw InvalidArgument("solver: tau_scale must be non-negative");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("solver: t_end must be positive");
  if (!(bisection_rel_width > 0.0 && bisection_rel_width < 1.0)) {
    throw InvalidArgument("solver: bisection_rel_width must lie in (0, 1)");
  }
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::reached_t_end: return "reached_t_end";
    case Termination::blowup_amplitude: return "blowup_amplitude";
    case Termination::blowup_w_floor: return "blowup_w_floor";
    case Termination::dt_underflow: return "dt_underflow";
  }
  return "unknown";
}

const char* to_string(LifespanStatus s) {
  switch (s) {
    case LifespanStatus::blowup: return "blowup";
    case LifespanStatus::dt_underflow: return "dt_underflow";
    case LifespanStatus::no_blowup_expected: return "no_blowup_expected";
    case LifespanStatus::horizon_exhausted: return "horizon_exhausted";
  }
  return "unknown";
}

StepResult nonlinear_substep(const ComplexField& field, double dt, const ModelParams& params) {
  if (!(dt > 0.0)) throw InvalidArgument("nonlinear_substep: dt must be positive");
  const double p = params.p;
  const double re = params.lambda.real();
  const double im = params.lambda.imag();
  StepResult out{field, std::nullopt};
  for (std::size_t j = 0; j < field.size(); ++j) {
    const cplx u = field.values[j];
    const double a = std::pow(std::abs(u), p - 1.0);
    const double c = (p - 1.0) * im * a;
    const double w = 1.0 - c * dt;
    if (w <= kWFloor) {
      out.field = field;
      out.blowup_x = field.grid.x(j);
      return out;
    }
    // int_0^dt W^{-1} = -log W / c, or dt when c = 0.
    const double integral = (c != 0.0) ? -std::log1p(-c * dt) / c : dt;
    const double theta = -re * a * integral;
    out.field.values[j] = u * std::pow(w, -1.0 / (p - 1.0)) * std::polar(1.0, theta);
  }
  return out;
}

StepResult strang_step(const ComplexField& field, double dt, const ModelParams& params,
                       const SpectralOps& ops) {
  const double t0 = field.time;
  ComplexField half = ops.free_propagate(field, 0.5 * dt);
  StepResult nl = nonlinear_substep(half, dt, params);
  if (nl.blowup_x) return StepResult{field, nl.blowup_x};
  ComplexField done = ops.free_propagate(nl.field, 0.5 * dt);
  done.time = t0 + dt;
  return StepResult{std::move(done), std::nullopt};
}

ComplexField initial_field(const ModelParams& params, const Grid1D& grid) {
  ComplexField f = params.profile.sample(grid);
  for (auto& v : f.values) v *= params.epsilon;
  return f;
}

double adaptive_dt(const SolverConfig& config, double sup_u) {
  const double stiffness = std::abs(config.params.lambda) * std::pow(sup_u, config.params.p - 1.0);
  return config.dt_initial / (1.0 + stiffness * config.tau_scale);
}

double mass(const ComplexField& field) {
  double acc = 0.0;
  for (const auto& v : field.values) acc += std::norm(v);
  return acc * field.grid.dx();
}

double power_integral(const ComplexField& field, double q) {
  double acc = 0.0;
  for (const auto& v : field.values) acc += std::pow(std::abs(v), q);
  return acc * field.grid.dx();
}

Trajectory evolve(const SolverConfig& config) {
  config.validate();
  const SpectralOps ops(config.grid);
  return run(config, ops).traj;
}

LifespanEstimate estimate_lifespan(const SolverConfig& config) {
  config.validate();
  const SpectralOps ops(config.grid);
  // Sparse records keep the boundary check active along the run; the state
  // right at the crossing is not checked since its spectrum is broadening.
  SolverConfig cfg = config;
  cfg.record_times.clear();
  for (int k = 1; k <= 32; ++k) cfg.record_times.push_back(config.t_end * k / 32.0);
  cfg.keep_fields = false;

  LifespanEstimate est;
  RunResult res;
  try {
    res = run(cfg, ops);
  } catch (const DomainError& e) {
    est.status = LifespanStatus::horizon_exhausted;
    est.T_num = kInf;
    est.diagnostic = std::string("domain too small: ") + e.what();
    return est;
  }
  const Trajectory& traj = res.traj;
  est.termination = traj.termination;
  est.t_reached = traj.t_final;
  est.steps = traj.steps;
  est.initial_sup = traj.initial_sup;

  if (!(config.params.lambda.imag() > 0.0)) {
    est.status = LifespanStatus::no_blowup_expected;
    est.T_num = kInf;
    est.T_lower = traj.t_final;
    est.diagnostic = "Im(lambda) <= 0: no blow-up within the horizon t_end = " +
                     std::to_string(config.t_end);
    return est;
  }
  if (!res.crossing) {
    est.status = LifespanStatus::horizon_exhausted;
    est.T_num = kInf;
    est.T_lower = traj.t_final;
    est.diagnostic = "no blow-up criterion fired before t_end = " + std::to_string(config.t_end) +
                     "; raise t_end and the box size";
    return est;
  }

  const Crossing& c = *res.crossing;
  if (traj.termination == Termination::dt_underflow) {
    est.status = LifespanStatus::dt_underflow;
    est.T_num = c.t_before;
    est.T_lower = c.t_before;
    est.diagnostic = "adaptive step fell below dt_floor";
    return est;
  }

  const double threshold = config.amp_blowup_factor * traj.initial_sup;
  auto fires = [&](double h) {
    StepResult r = strang_step(c.before, h, config.params, ops);
    return r.blowup_x.has_value() || sup_abs(r.field) >= threshold;
  };
  double lo = 0.0;
  double hi = c.dt;
  while (hi - lo > config.bisection_rel_width * (c.t_before + hi)) {
    const double mid = 0.5 * (lo + hi);
    (fires(mid) ? hi : lo) = mid;
  }
  est.status = LifespanStatus::blowup;
  est.T_num = c.t_before + hi;
  est.T_lower = c.t_before + lo;
  return est;
}

}  // namespace lifespan

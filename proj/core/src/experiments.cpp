#include "lifespan/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "lifespan/csv.hpp"
#include "lifespan/error.hpp"

namespace lifespan {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const char* const kSweepColumns[] = {"eps", "T_num", "scaled", "bound_const", "ratio", "termination",
                                     "L", "N", "dt_floor", "K_b", "B_over_A", "schema_version"};

Grid1D grid_for(const ModelParams& params, const SolverKnobs& knobs, double t_end) {
  if (knobs.grid) return *knobs.grid;
  const InitialProfile& prof = params.profile;
  const double k_max = knobs.k_max_factor * (std::abs(prof.wavenumber) + prof.xi_cutoff());
  const double reach = params.lambda == cplx(0.0) ? 1.0 : knobs.nonlinear_reach;
  return grid_for_horizon(reach * t_end, prof.spectral_radius(0.999), k_max);
}

}  // namespace

double lifespan_exponent(double p) { return 2.0 * (p - 1.0) / (3.0 - p); }

TheoreticalBound theoretical_bound(double p, cplx lambda, double hat_sup, std::optional<double> eps,
                                   std::optional<double> B) {
  if (!(p >= 2.0 && p <= 3.0)) throw InvalidArgument("theoretical_bound: p must lie in [2, 3]");
  if (!(hat_sup >= 0.0)) throw InvalidArgument("theoretical_bound: sup|hat phi| must be >= 0");
  TheoreticalBound b;
  b.p = p;
  b.A = blowup_constant_A(p, lambda, hat_sup);
  if (p == 3.0) {
    const double inv = 2.0 * lambda.imag() * hat_sup * hat_sup;
    b.p3_log_bound = inv > 0.0 ? 1.0 / inv : kInf;
    return b;
  }
  const double e = 2.0 / (3.0 - p);
  b.liminf_const = std::isfinite(b.A) ? std::pow((3.0 - p) * b.A / 2.0, e) : kInf;
  if (eps && B) {
    if (!(*eps > 0.0)) throw InvalidArgument("theoretical_bound: eps must be positive");
    b.T_B = std::isfinite(*B) ? std::pow((3.0 - p) * *B / (2.0 * std::pow(*eps, p - 1.0)), e) : kInf;
  }
  return b;
}

TheoreticalBound theoretical_bound(const ModelParams& params) {
  params.validate();
  return theoretical_bound(params.p, params.lambda, params.profile.hat_sup(), params.epsilon,
                           profile_horizon(params));
}

SolverConfig lifespan_config(const ModelParams& params, const SolverKnobs& knobs) {
  params.validate();
  SolverConfig c;
  c.params = params;
  c.dt_initial = knobs.dt_initial;
  c.dt_floor = knobs.dt_floor;
  c.amp_blowup_factor = knobs.K_b;
  c.tau_scale = knobs.tau_scale;
  c.boundary_tol = knobs.boundary_tol;
  c.bisection_rel_width = knobs.bisection_rel_width;
  if (knobs.t_end) {
    c.t_end = *knobs.t_end;
  } else {
    const TheoreticalBound b = theoretical_bound(params);
    const double T = *b.liminf_const / std::pow(params.epsilon, lifespan_exponent(params.p));
    if (!std::isfinite(T)) {
      throw InvalidArgument("no finite life-span bound for these parameters; set t_end explicitly");
    }
    c.t_end = knobs.horizon_factor * T;
  }
  c.grid = grid_for(params, knobs, c.t_end);
  return c;
}

LifespanRecord lifespan_record(const ModelParams& params, const SolverKnobs& knobs) {
  const SolverConfig cfg = lifespan_config(params, knobs);
  const LifespanEstimate est = estimate_lifespan(cfg);
  const TheoreticalBound b = theoretical_bound(params);
  LifespanRecord r;
  r.eps = params.epsilon;
  r.T_num = est.T_num;
  r.scaled = std::pow(params.epsilon, lifespan_exponent(params.p)) * est.T_num;
  r.bound_const = b.liminf_const.value_or(kInf);
  r.ratio = std::isfinite(r.bound_const) ? r.scaled / r.bound_const : 0.0;
  r.status = to_string(est.status);
  r.termination = est.status == LifespanStatus::blowup ? to_string(est.termination) : r.status;
  r.L = cfg.grid.half_width();
  r.N = cfg.grid.size();
  r.dt_floor = cfg.dt_floor;
  r.K_b = cfg.amp_blowup_factor;
  r.B_over_A = params.B_over_A;
  r.diagnostic = est.diagnostic;
  return r;
}

std::size_t worker_threads(std::size_t requested) {
  std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LIFESPAN_LAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(n, 1);
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first;
  std::mutex mu;
  auto worker = [&] {
    while (!stop) {
      const std::size_t i = next++;
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
        stop = true;
      }
    }
  };
  const std::size_t k = std::min(std::max<std::size_t>(threads, 1), std::max<std::size_t>(n, 1));
  if (k == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first) std::rethrow_exception(first);
}

SweepResult sweep_lifespan(const SweepSettings& settings) {
  if (settings.eps.empty()) throw InvalidArgument("sweep: the eps ladder is empty");
  if (!(settings.base.lambda.imag() > 0.0)) throw InvalidArgument("sweep: requires Im(lambda) > 0");
  SweepResult out;
  out.expected_slope = -lifespan_exponent(settings.base.p);
  std::vector<std::optional<LifespanRecord>> slots(settings.eps.size());
  try {
    parallel_for(settings.eps.size(), worker_threads(settings.threads), [&](std::size_t i) {
      ModelParams p = settings.base;
      p.epsilon = settings.eps[i];
      LifespanRecord r = lifespan_record(p, settings.knobs);
      const bool ok = r.status == to_string(LifespanStatus::blowup);
      const std::string why = r.status + " at eps = " + format_double(r.eps) + ": " + r.diagnostic;
      slots[i] = std::move(r);
      if (!ok) throw Error(why);
    });
  } catch (const Error& e) {
    out.partial = true;
    out.error = e.what();
  }
  std::vector<double> xs, ys;
  for (auto& s : slots) {
    if (!s) continue;
    if (s->status == to_string(LifespanStatus::blowup)) {
      xs.push_back(s->eps);
      ys.push_back(s->T_num);
    }
    out.records.push_back(std::move(*s));
  }
  if (xs.size() >= 2) out.fit = fit_loglog(xs, ys);
  return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  if (result.partial) os << "# PARTIAL: " << result.error << '\n';
  write_csv_row(os, std::vector<std::string>(std::begin(kSweepColumns), std::end(kSweepColumns)));
  for (const auto& r : result.records) {
    write_csv_row(os, {format_double(r.eps), format_double(r.T_num), format_double(r.scaled),
                       format_double(r.bound_const), format_double(r.ratio), r.termination,
                       format_double(r.L), std::to_string(r.N), format_double(r.dt_floor),
                       format_double(r.K_b), format_double(r.B_over_A),
                       std::to_string(kCsvSchemaVersion)});
  }
}

std::vector<LifespanRecord> read_sweep_csv(std::istream& is) {
  std::vector<LifespanRecord> out;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (!header) {
      const std::vector<std::string> expected(std::begin(kSweepColumns), std::end(kSweepColumns));
      if (cells != expected) throw InvalidArgument("sweep CSV: unexpected header '" + line + "'");
      header = true;
      continue;
    }
    if (cells.size() != std::size(kSweepColumns)) throw InvalidArgument("sweep CSV: bad row '" + line + "'");
    if (cells[11] != std::to_string(kCsvSchemaVersion)) {
      throw InvalidArgument("sweep CSV: unsupported schema_version " + cells[11]);
    }
    LifespanRecord r;
    r.eps = parse_double(cells[0]);
    r.T_num = parse_double(cells[1]);
    r.scaled = parse_double(cells[2]);
    r.bound_const = parse_double(cells[3]);
    r.ratio = parse_double(cells[4]);
    r.termination = cells[5];
    r.L = parse_double(cells[6]);
    r.N = static_cast<std::size_t>(parse_double(cells[7]));
    r.dt_floor = parse_double(cells[8]);
    r.K_b = parse_double(cells[9]);
    r.B_over_A = parse_double(cells[10]);
    out.push_back(std::move(r));
  }
  if (!header) throw InvalidArgument("sweep CSV: missing header");
  return out;
}

namespace {

struct ScanSamples {
  std::vector<double> free_lhs, free_rhs;
  std::vector<double> q2_lhs, q2_rhs;
  std::vector<double> gap_lhs, gap_rhs;
};

}  // namespace

ResidualScan residual_scan(const ResidualScanSettings& settings) {
  if (settings.eps.size() < 2) throw InvalidArgument("residual scan: need at least two eps values");
  const std::size_t n = settings.eps.size();
  std::vector<ResidualScanRow> rows(n);
  std::vector<ScanSamples> samples(n);
  parallel_for(n, worker_threads(settings.threads), [&](std::size_t i) {
    ModelParams params = settings.base;
    params.epsilon = settings.eps[i];
    const ApproxContext ctx(params, settings.approx);
    const double eps = params.epsilon;
    const double p = params.p;
    const double delta = params.delta_value();
    ResidualScanRow& row = rows[i];
    row.eps = eps;
    row.delta = delta;
    row.L = ctx.grid().half_width();
    row.L_points = ctx.grid().size();
    row.budget = residual_budget(ctx, settings.budget);

    ScanSamples& s = samples[i];
    const RegionIntegral& free = row.budget.regions.front();
    for (std::size_t k = 0; k < free.times.size(); ++k) {
      const double t = free.times[k];
      if (t <= 0.0) continue;
      s.free_lhs.push_back(free.norms[k]);
      s.free_rhs.push_back(std::pow(eps, p) * std::pow(1.0 + t, -0.5 * (p - 1.0)));
    }
    if (ctx.T_B() > 2.0 / eps) {
      for (double t : log_spaced(2.0 / eps, ctx.T_B(), settings.q2_samples)) {
        ComplexField Q1(ctx.grid(), t), Q2(ctx.grid(), t);
        profile_remainders(ctx, t, Q1, Q2);
        s.q2_lhs.push_back(ctx.ops().norms(Q2, t).x_norm);
        s.q2_rhs.push_back(eps / (t * t * delta * delta));
      }
    }
    const double blend_end = std::min(2.0 / eps, ctx.T_B());
    if (blend_end > 1.0 / eps) {
      const auto ts = lin_spaced(1.0 / eps, blend_end, settings.gap_samples + 2);
      for (std::size_t k = 1; k + 1 < ts.size(); ++k) {
        s.gap_lhs.push_back(matching_gap(ctx, ts[k]).gap.x_norm);
        s.gap_rhs.push_back(std::pow(eps, 1.5));
      }
    }
  });

  ResidualScan scan;
  scan.rows = std::move(rows);
  std::vector<double> e, I;
  for (const auto& r : scan.rows) {
    e.push_back(r.eps);
    I.push_back(r.budget.I_total);
  }
  scan.fit = fit_loglog(e, I);
  // Decreasing as eps decreases, whatever order the ladder was given in.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return e[a] > e[b]; });
  scan.decreasing = true;
  for (std::size_t k = 1; k < n; ++k) {
    if (!(I[order[k]] < I[order[k - 1]])) scan.decreasing = false;
  }

  auto gather = [&](auto member_lhs, auto member_rhs, std::vector<double>& lhs, std::vector<double>& rhs,
                    std::vector<double>& keys) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& l = samples[i].*member_lhs;
      const auto& r = samples[i].*member_rhs;
      lhs.insert(lhs.end(), l.begin(), l.end());
      rhs.insert(rhs.end(), r.begin(), r.end());
      keys.insert(keys.end(), l.size(), e[i]);
    }
  };
  auto make = [&](const char* name, auto ml, auto mr) {
    std::vector<double> lhs, rhs, keys;
    gather(ml, mr, lhs, rhs, keys);
    if (lhs.empty()) {
      BoundCheck c;
      c.name = name;
      return c;
    }
    return check_bound(name, lhs, rhs, keys);
  };
  scan.free_residual = make("free_residual", &ScanSamples::free_lhs, &ScanSamples::free_rhs);
  scan.q2_decay = make("q2_decay", &ScanSamples::q2_lhs, &ScanSamples::q2_rhs);
  scan.matching = make("matching_gap", &ScanSamples::gap_lhs, &ScanSamples::gap_rhs);
  std::vector<double> fl, fr;
  for (const auto& r : scan.rows) {
    fl.push_back(r.budget.I_free);
    fr.push_back(std::pow(r.eps, 1.5));
  }
  scan.free_budget = check_bound("free_budget", fl, fr, e);
  return scan;
}

void write_residual_csv(std::ostream& os, const ResidualScan& scan) {
  write_csv_row(os, {"eps", "delta", "T_B", "I_free", "I_blend", "I_profile", "I_total", "L", "N",
                     "schema_version"});
  for (const auto& r : scan.rows) {
    write_csv_row(os, {format_double(r.eps), format_double(r.delta), format_double(r.budget.T_B),
                       format_double(r.budget.I_free), format_double(r.budget.I_blend),
                       format_double(r.budget.I_profile), format_double(r.budget.I_total),
                       format_double(r.L), std::to_string(r.L_points),
                       std::to_string(kCsvSchemaVersion)});
  }
}

BootstrapGap bootstrap_run(const BootstrapSettings& settings) {
  if (!(settings.fraction > 0.0 && settings.fraction <= 1.0)) {
    throw InvalidArgument("bootstrap: fraction must lie in (0, 1]");
  }
  const ApproxContext ctx(settings.params, settings.approx);
  SolverKnobs knobs = settings.knobs;
  knobs.grid = ctx.grid();
  knobs.t_end = settings.fraction * ctx.T_B();
  SolverConfig cfg = lifespan_config(settings.params, knobs);
  cfg.record_times = lin_spaced(0.0, cfg.t_end, std::max<std::size_t>(settings.records, 2));
  cfg.keep_fields = true;
  const Trajectory traj = evolve(cfg);
  if (traj.termination != Termination::reached_t_end) {
    throw Error(std::string("bootstrap: the solution met the blow-up criterion (") +
                to_string(traj.termination) + ") before " + format_double(cfg.t_end));
  }
  return bootstrap_gap(ctx, traj);
}

std::vector<DecaySample> decay_run(const ModelParams& params, double t_end, std::size_t records,
                                   const SolverKnobs& knobs) {
  SolverKnobs k = knobs;
  k.t_end = t_end;
  SolverConfig cfg = lifespan_config(params, k);
  cfg.record_times = lin_spaced(0.0, t_end, std::max<std::size_t>(records, 2));
  cfg.keep_fields = false;
  const Trajectory traj = evolve(cfg);
  std::vector<DecaySample> out;
  for (const auto& r : traj.records) {
    DecaySample d;
    d.t = r.t;
    d.sup = r.norms.l_inf;
    d.weighted = d.sup * std::pow(1.0 + r.t, 1.0 / (params.p - 1.0));
    d.mass = r.mass;
    out.push_back(d);
  }
  return out;
}

}  // namespace lifespan

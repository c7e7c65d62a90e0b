#include "lifespan/property_suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include <json.hpp>

#include "lifespan/approx.hpp"
#include "lifespan/error.hpp"
#include "lifespan/experiments.hpp"
#include "lifespan/mollifier.hpp"
#include "lifespan/profile.hpp"
#include "lifespan/solver.hpp"
#include "lifespan/spectral.hpp"

namespace lifespan {
namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

cplx random_complex(Rng& rng, double log10_min, double log10_max) {
  return std::polar(std::pow(10.0, uniform(rng, log10_min, log10_max)),
                    uniform(rng, -std::numbers::pi, std::numbers::pi));
}

Assertion assert_le(std::string name, double value, double limit) {
  return Assertion{std::move(name), value, limit, value <= limit};
}

Assertion assert_ge(std::string name, double value, double limit) {
  return Assertion{std::move(name), value, limit, value >= limit};
}

double sup_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

// Accumulates (lhs, rhs, key) samples per check name, in insertion order.
class Collector {
 public:
  void add(const std::string& name, double lhs, double rhs, double key) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      it = index_.emplace(name, data_.size()).first;
      data_.push_back({name, {}, {}, {}});
    }
    auto& d = data_[it->second];
    d.lhs.push_back(lhs);
    d.rhs.push_back(rhs);
    d.keys.push_back(key);
  }

  void finish(SuiteResult& suite, const BoundOptions& options, bool use_keys = true) const {
    for (const auto& d : data_) {
      const std::span<const double> keys = use_keys ? std::span<const double>(d.keys) : std::span<const double>();
      suite.checks.push_back(check_bound(d.name, d.lhs, d.rhs, keys, options));
    }
  }

 private:
  struct Data {
    std::string name;
    std::vector<double> lhs, rhs, keys;
  };
  std::vector<Data> data_;
  std::map<std::string, std::size_t> index_;
};

ComplexField random_packet(Rng& rng, const Grid1D& grid) {
  const int terms = static_cast<int>(uniform(rng, 1.0, 3.999));
  ComplexField f(grid, 0.0);
  for (int k = 0; k < terms; ++k) {
    const cplx a = random_complex(rng, std::log10(0.2), 0.0);
    const double c = uniform(rng, -5.0, 5.0);
    const double w = uniform(rng, 0.7, 2.0);
    const double kk = uniform(rng, -1.5, 1.5);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double y = (grid.x(j) - c) / w;
      f.values[j] += a * std::exp(-0.5 * y * y) * std::polar(1.0, kk * grid.x(j));
    }
  }
  return f;
}

template <class F>
SuiteResult timed(const char* name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult s;
  s.name = name;
  try {
    body(s);
  } catch (const std::exception& e) {
    s.assertions.push_back(Assertion{std::string("completed without error: ") + e.what(), 1.0, 0.0, false});
  }
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  finish_suite(s);
  return s;
}

}  // namespace

void finish_suite(SuiteResult& suite) {
  suite.passed = true;
  for (const auto& c : suite.checks) suite.passed = suite.passed && c.passed;
  for (const auto& a : suite.assertions) suite.passed = suite.passed && a.passed;
}

SuiteResult suite_pointwise_lemma(const PropertyOptions& options) {
  return timed("pointwise_lemma", [&](SuiteResult& s) {
    Rng rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
    Collector col;
    for (std::size_t i = 0; i < options.lemma_pairs; ++i) {
      const double q = uniform(rng, 2.0, 3.0);
      const cplx a1 = random_complex(rng, -3.0, 3.0);
      cplx a2;
      const double pick = uniform(rng, 0.0, 1.0);
      if (pick < 0.4) {
        a2 = random_complex(rng, -3.0, 3.0);
      } else if (pick < 0.9) {
        a2 = a1 + std::abs(a1) * random_complex(rng, -8.0, 0.0);
      } else if (pick < 0.95) {
        a2 = -a1 * uniform(rng, 0.0, 2.0);
      } else {
        a2 = 0.0;
      }
      const double r1 = std::abs(a1), r2 = std::abs(a2);
      const double rhs = std::abs(a1 - a2) * std::pow(r1 + r2, q - 2.0);
      if (rhs == 0.0) continue;
      const double lhs1 = std::abs(std::pow(r1, q - 1.0) - std::pow(r2, q - 1.0));
      const auto F = [q](cplx a) { return a == cplx{} ? cplx{} : std::pow(std::abs(a), q - 3.0) * a * a; };
      const double lhs2 = std::abs(F(a1) - F(a2));
      col.add("difference_of_powers", lhs1, rhs, 0.0);
      col.add("difference_of_squared_phases", lhs2, rhs, 0.0);
    }
    BoundOptions opt;
    opt.ceiling = 2.0;
    opt.scale = options.lemma_scale;
    col.finish(s, opt, false);
  });
}

SuiteResult suite_embedding(const PropertyOptions&) {
  return timed("dispersive_embedding", [&](SuiteResult& s) {
    struct Run {
      double p;
      cplx lambda;
      double eps;
      double t_end;
    };
    const Run runs[] = {{2.0, {0.0, 1.0}, 0.3, 4.0},
                        {2.5, {0.0, -1.0}, 0.5, 20.0},
                        {2.0, {1.0, 0.0}, 0.3, 10.0},
                        {2.0, {0.0, 0.0}, 0.5, 10.0},
                        {2.8, {0.5, 0.5}, 0.4, 6.0}};
    Collector col;
    for (const auto& r : runs) {
      ModelParams mp;
      mp.p = r.p;
      mp.lambda = r.lambda;
      mp.epsilon = r.eps;
      SolverKnobs knobs;
      knobs.t_end = r.t_end;
      SolverConfig cfg = lifespan_config(mp, knobs);
      cfg.record_times = lin_spaced(0.0, r.t_end, 25);
      cfg.keep_fields = false;
      const Trajectory traj = evolve(cfg);
      for (const auto& rec : traj.records) {
        col.add("sup_decay", rec.norms.l_inf * std::sqrt(1.0 + rec.t), rec.norms.x_norm, 1.0 / (1.0 + rec.t));
      }
    }
    BoundOptions opt;
    opt.ceiling = 1.0 / std::sqrt(2.0);
    col.finish(s, opt);
  });
}

SuiteResult suite_mollifier(const PropertyOptions& options) {
  return timed("mollifier", [&](SuiteResult& s) {
    const InitialProfile g = InitialProfile::gaussian();
    const XiGrid grid = XiGrid::symmetric(0.0, 12.0, 1e-3);
    std::vector<cplx> hat(grid.count), dhat(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
      hat[i] = g.hat(grid.at(i));
      dhat[i] = g.hat_derivative(grid.at(i));
    }
    const std::vector<double> deltas{0.4, 0.2, 0.1, 0.05};
    std::vector<double> errs;
    for (double d : deltas) errs.push_back(mollification_error(hat, dhat, grid, 2.0, d).h1);
    double worst_ratio = 0.0;
    for (std::size_t k = 1; k < errs.size(); ++k) worst_ratio = std::max(worst_ratio, errs[k] / errs[k - 1]);
    s.assertions.push_back(Assertion{"H1 error strictly decreasing in delta (max successive ratio)",
                                     worst_ratio, 1.0, worst_ratio < 1.0});
    s.assertions.push_back(assert_le("H1 error at delta = 0.05", errs.back(), 1e-3));
    const double h1 = power_amplitude_h1(hat, dhat, grid, 2.0);
    const auto env = error_envelope(deltas, errs, 2.0 * h1);
    s.assertions.push_back(assert_le("envelope at the largest delta vs 2 ||g||_H1", env.front(), 2.0 * h1));

    Rng rng(options.seed ^ 0x51ed27ULL);
    double young = 0.0, constant_dev = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const XiGrid fg = XiGrid::symmetric(0.0, 10.0, 0.01);
      std::vector<double> f(fg.count);
      const double c = uniform(rng, -3.0, 3.0), w = uniform(rng, 0.2, 2.0), a = uniform(rng, 0.1, 3.0);
      for (std::size_t i = 0; i < fg.count; ++i) {
        const double y = (fg.at(i) - c) / w;
        f[i] = a * std::exp(-0.5 * y * y) * (1.0 + 0.3 * std::sin(3.0 * fg.at(i)));
      }
      const Kernel k = bump_kernel(uniform(rng, 0.05, 1.0), fg.spacing);
      const auto mf = mollify(f, k);
      double n0 = 0.0, n1 = 0.0;
      for (std::size_t i = 0; i < fg.count; ++i) {
        n0 += f[i] * f[i];
        n1 += mf[i] * mf[i];
      }
      young = std::max(young, std::sqrt(n1 / n0));
      const std::vector<double> ones(fg.count, 1.7);
      for (double v : mollify(ones, k)) constant_dev = std::max(constant_dev, std::abs(v - 1.7));
    }
    s.assertions.push_back(assert_le("Young: ||rho * f|| / ||f||", young, 1.0 + 1e-12));
    s.assertions.push_back(assert_le("constants are fixed points", constant_dev, 1e-12));
  });
}

SuiteResult suite_nonlinear_difference(const PropertyOptions& options) {
  return timed("nonlinear_difference", [&](SuiteResult& s) {
    Rng rng(options.seed ^ 0x2545f4914f6cdd1dULL);
    const Grid1D grid(200.0, 4096);
    const SpectralOps ops(grid);
    Collector col;
    for (int i = 0; i < 300; ++i) {
      ModelParams mp;
      mp.p = uniform(rng, 2.0, 2.999);
      mp.lambda = {1.0, 0.0};
      const double t = uniform(rng, 0.0, 30.0);
      const ComplexField f1 = random_packet(rng, grid);
      ComplexField f2 = random_packet(rng, grid);
      if (uniform(rng, 0.0, 1.0) < 0.5) {
        const double eta = std::pow(10.0, uniform(rng, -3.0, 0.0));
        for (std::size_t j = 0; j < grid.size(); ++j) f2.values[j] = f1.values[j] + eta * f2.values[j];
      }
      const ComplexField w1 = ops.free_propagate(f1, t);
      const ComplexField w2 = ops.free_propagate(f2, t);
      const double x1 = ops.norms(w1, t).x_norm;
      const double x2 = ops.norms(w2, t).x_norm;
      const double xd = ops.norms(w1 - w2, t).x_norm;
      const ComplexField dn = nonlinearity(w1, mp) - nonlinearity(w2, mp);
      const double lhs = ops.norms(dn, t).x_norm;
      const double rhs = std::pow(1.0 + t, -0.5 * (mp.p - 1.0)) * std::pow(std::max(x1, x2), mp.p - 1.0) * xd;
      col.add("nonlinear_difference", lhs, rhs, 1.0 / (1.0 + t));
    }
    col.finish(s, BoundOptions{});
  });
}

SuiteResult suite_profile_derivatives(const PropertyOptions&) {
  return timed("profile_derivatives", [&](SuiteResult& s) {
    struct Case {
      const char* name;
      InitialProfile profile;
      cplx lambda;
    };
    InitialProfile h1 = InitialProfile::gaussian();
    h1.kind = ProfileKind::hermite1;
    const Case cases[] = {{"gaussian", InitialProfile::gaussian(), {0.5, 1.0}}, {"hermite1", h1, {0.0, 1.0}}};
    const std::vector<double> deltas{0.5, 0.25, 0.125, 0.0625};
    Collector col;
    double worst_w = 0.0, w_limit = 0.0;
    for (const auto& c : cases) {
      for (double delta : deltas) {
        ModelParams mp;
        mp.p = 2.0;
        mp.lambda = c.lambda;
        mp.profile = c.profile;
        mp.delta = delta;
        mp.B_over_A = 0.9;
        const ProfileModel model(mp, 2e-3, true);
        const double h = model.grid().spacing;
        w_limit = model.A() / (model.A() - model.B());
        for (double sv : lin_spaced(0.0, model.B(), 31)) {
          const ProfileEval e = model.eval(sv);
          for (double w : e.W) worst_w = std::max(worst_w, (1.0 / w) / w_limit);
          const std::vector<cplx> F[2] = {model.phase_factor(sv, 1.0), model.phase_factor_ds(sv)};
          for (int l = 0; l < 2; ++l) {
            for (int m = 0; m <= 3; ++m) {
              const auto d = m == 0 ? F[l] : fd_derivative(std::span<const cplx>(F[l]), h, m);
              const double weight = std::pow(delta, std::max(0, m - 1));
              col.add(std::string(c.name) + "/amplitude/ds" + std::to_string(l) + "/dxi" + std::to_string(m),
                      sup_abs(d) * weight, 1.0, delta);
            }
          }
          const auto Fp = model.phase_factor(sv, mp.p);
          col.add(std::string(c.name) + "/power/dxi0", sup_abs(Fp), 1.0, delta);
          col.add(std::string(c.name) + "/power/dxi1",
                  sup_abs(fd_derivative(std::span<const cplx>(Fp), h, 1)), 1.0, delta);
        }
      }
    }
    col.finish(s, BoundOptions{});
    s.assertions.push_back(assert_le("max W^-1 / (A / (A - B))", worst_w, 1.0 + 1e-12));
  });
}

SuiteResult suite_profile_identity(const PropertyOptions& options) {
  return timed("profile_identity", [&](SuiteResult& s) {
    for (const cplx lambda : {cplx(0.0, 1.0), cplx(0.5, 1.0)}) {
      for (const bool mollified : {true, false}) {
        ModelParams mp;
        mp.lambda = lambda;
        mp.delta = 0.3;
        const ProfileModel model(mp, 1e-3, mollified);
        const double sv = 0.5 * model.B();
        std::vector<double> gaps;
        double rhs_sup = 0.0;
        for (double h : {0.04, 0.02, 0.01}) {
          const ProfileResidual r = profile_residual(model, sv, h);
          gaps.push_back(r.max_gap);
          rhs_sup = sup_abs(r.rhs);
        }
        const std::string tag = std::string(mollified ? "mollified" : "plain") + ", Re lambda = " +
                                std::to_string(lambda.real());
        double order = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < gaps.size(); ++k) order = std::min(order, std::log2(gaps[k - 1] / gaps[k]));
        s.assertions.push_back(assert_ge("finite-difference order of the residual identity (" + tag + ")",
                                         order, 1.9));
        if (!mollified) s.assertions.push_back(assert_le("closed-form residual vanishes (" + tag + ")", rhs_sup, 0.0));

        const ProfileEval e = model.eval(sv);
        double modulus = 0.0;
        for (std::size_t i = 0; i < e.V.size(); ++i) {
          const double expect = std::pow(e.W[i], -1.0 / (mp.p - 1.0)) * std::abs(model.hat()[i]);
          modulus = std::max(modulus, std::abs(std::abs(e.V[i]) - expect));
        }
        s.assertions.push_back(assert_le("modulus law |V| = W^{-1/(p-1)} |hat phi| (" + tag + ")", modulus, 1e-14));
      }
    }

    // Closed form against the RK4 oracle on random admissible draws.
    Rng rng(options.seed ^ 0x7f4a7c15ULL);
    double worst = 0.0;
    for (int d = 0; d < 20; ++d) {
      ModelParams mp;
      mp.p = uniform(rng, 2.0, 2.9);
      mp.lambda = {uniform(rng, -1.0, 1.0), uniform(rng, 0.25, 1.5)};
      mp.profile = InitialProfile::gaussian(uniform(rng, 0.5, 1.5), uniform(rng, 0.5, 2.0),
                                            uniform(rng, -2.0, 2.0), uniform(rng, -1.0, 1.0));
      const double cut = mp.profile.xi_cutoff(1e-17);
      const XiGrid grid = XiGrid::symmetric(mp.profile.wavenumber, cut, 2.0 * cut / 64.0);
      const ProfileModel model(mp, grid, false);
      const auto sp = lin_spaced(0.0, 0.9 * model.A(), 6);
      const auto oracle = rk4_oracle(sp, mp, grid, 1e-10);
      for (std::size_t k = 0; k < sp.size(); ++k) {
        const auto e = model.eval(std::min(sp[k], model.B()));
        for (std::size_t i = 0; i < grid.count; ++i) worst = std::max(worst, std::abs(e.V[i] - oracle[k][i]));
      }
    }
    s.assertions.push_back(assert_le("closed form vs RK4 oracle (20 draws)", worst, 1e-8));
  });
}

SuiteResult suite_remainder_identity(const PropertyOptions&) {
  return timed("remainder_identity", [&](SuiteResult& s) {
    ModelParams mp;
    mp.epsilon = 0.08;
    ApproxOptions plain;
    plain.mollified = false;
    const ApproxContext ctx_plain(mp, plain);
    const double t = 0.5 * (2.0 / mp.epsilon + ctx_plain.T_B());
    ComplexField Q1(ctx_plain.grid(), t), Q2(ctx_plain.grid(), t);
    profile_remainders(ctx_plain, t, Q1, Q2);
    s.assertions.push_back(assert_le("Q1 vanishes without mollification", sup_norm(Q1), 0.0));

    const ApproxContext ctx(mp);
    for (double tt : {0.5 / mp.epsilon, 1.5 / mp.epsilon, t}) {
      const ResidualConsistency rc = residual_consistency(ctx, tt, 0.08, 3);
      const double order = *std::min_element(rc.orders.begin(), rc.orders.end());
      s.assertions.push_back(assert_ge(std::string("closed-form R vs finite differences, ") +
                                           to_string(rc.region) + " region (order)",
                                       order, 1.9));
    }
  });
}

std::vector<std::string> property_suite_names() {
  return {"pointwise_lemma",      "dispersive_embedding", "mollifier",         "nonlinear_difference",
          "profile_derivatives", "profile_identity",     "remainder_identity"};
}

PropertyReport run_property_suites(const PropertyOptions& options, const std::vector<std::string>& only) {
  using Fn = SuiteResult (*)(const PropertyOptions&);
  const std::vector<std::pair<std::string, Fn>> all = {
      {"pointwise_lemma", suite_pointwise_lemma},
      {"dispersive_embedding", suite_embedding},
      {"mollifier", suite_mollifier},
      {"nonlinear_difference", suite_nonlinear_difference},
      {"profile_derivatives", suite_profile_derivatives},
      {"profile_identity", suite_profile_identity},
      {"remainder_identity", suite_remainder_identity}};
  std::vector<std::pair<std::string, Fn>> selected;
  for (const auto& entry : all) {
    if (only.empty() || std::find(only.begin(), only.end(), entry.first) != only.end()) selected.push_back(entry);
  }
  for (const auto& name : only) {
    const bool known = std::any_of(all.begin(), all.end(), [&](const auto& e) { return e.first == name; });
    if (!known) throw InvalidArgument("unknown property suite '" + name + "'");
  }
  PropertyReport report;
  report.seed = options.seed;
  report.suites.resize(selected.size());
  parallel_for(selected.size(), worker_threads(options.threads),
               [&](std::size_t i) { report.suites[i] = selected[i].second(options); });
  report.passed = std::all_of(report.suites.begin(), report.suites.end(), [](const auto& s) { return s.passed; });
  return report;
}

std::string to_json(const PropertyReport& report) {
  using json = nlohmann::json;
  json root;
  root["seed"] = report.seed;
  root["passed"] = report.passed;
  root["suites"] = json::array();
  for (const auto& s : report.suites) {
    json js{{"name", s.name}, {"passed", s.passed}, {"seconds", s.seconds}};
    js["checks"] = json::array();
    for (const auto& c : s.checks) {
      js["checks"].push_back({{"name", c.name},
                              {"samples", c.samples},
                              {"calibration_samples", c.calibration_samples},
                              {"fitted_constant", c.fitted_constant},
                              {"max_ratio", c.max_ratio},
                              {"margin", c.margin},
                              {"ceiling", c.ceiling ? json(*c.ceiling) : json(nullptr)},
                              {"scale", c.scale},
                              {"violations", c.violations},
                              {"passed", c.passed}});
    }
    js["assertions"] = json::array();
    for (const auto& a : s.assertions) {
      js["assertions"].push_back({{"name", a.name}, {"value", a.value}, {"limit", a.limit}, {"passed", a.passed}});
    }
    root["suites"].push_back(js);
  }
  return root.dump(2);
}

}  // namespace lifespan

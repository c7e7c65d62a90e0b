#include <doctest.h>

#include <cmath>
#include <random>

#include "lifespan/error.hpp"
#include "lifespan/experiments.hpp"
#include "lifespan/solver.hpp"
#include "test_support.hpp"

using namespace lifespan;
using lifespan::test::max_abs_diff;

namespace {

const cplx kI(0.0, 1.0);

ModelParams params(double p, cplx lambda, double eps) {
  ModelParams m;
  m.p = p;
  m.lambda = lambda;
  m.epsilon = eps;
  return m;
}

SolverConfig config(const ModelParams& m, double t_end, std::size_t records) {
  SolverKnobs k;
  k.t_end = t_end;
  SolverConfig c = lifespan_config(m, k);
  c.record_times = lin_spaced(0.0, t_end, records);
  c.keep_fields = false;
  return c;
}

// Fixed-step Strang integration to time T.
ComplexField strang_to(const ComplexField& u0, double T, int steps, const ModelParams& m, const SpectralOps& ops) {
  ComplexField u = u0;
  for (int n = 0; n < steps; ++n) u = strang_step(u, T / steps, m, ops).field;
  return u;
}

}  // namespace

TEST_CASE("nonlinear substep: gauge rotation for real lambda") {
  const Grid1D g(5.0, 16);
  ComplexField u(g);
  for (std::size_t j = 0; j < g.size(); ++j) u.values[j] = std::polar(0.1 + 0.05 * j, 0.3 * j);
  const ModelParams m = params(2.5, 0.7, 0.1);
  const ComplexField v = nonlinear_substep(u, 0.2, m).field;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double r = std::abs(u.values[j]);
    CHECK(std::abs(v.values[j]) == doctest::Approx(r).epsilon(1e-15));
    const cplx expected = u.values[j] * std::polar(1.0, -0.7 * std::pow(r, 1.5) * 0.2);
    CHECK(std::abs(v.values[j] - expected) < 1e-15);
  }
}

TEST_CASE("nonlinear substep: scalar closed form and the RK4 oracle") {
  const Grid1D g(5.0, 8);
  ComplexField one(g);
  for (auto& v : one.values) v = 1.0;
  const StepResult r = nonlinear_substep(one, 0.5, params(2.0, kI, 0.1));
  REQUIRE_FALSE(r.blowup_x);
  for (const auto& v : r.field.values) CHECK(std::abs(v - cplx(2.0)) < 1e-14);
  CHECK(nonlinear_substep(one, 1.0, params(2.0, kI, 0.1)).blowup_x.has_value());

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams m = params(2.0 + 0.9 * (U(rng) + 1.0) / 2.0, cplx(U(rng), U(rng)), 0.1);
    ComplexField u(g);
    for (auto& v : u.values) v = cplx(U(rng), U(rng));
    const ComplexField out = nonlinear_substep(u, 1e-2, m).field;
    for (std::size_t j = 0; j < g.size(); ++j) {
      CHECK(std::abs(out.values[j] - rk4_scalar(u.values[j], 1e-2, m.p, m.lambda, 1e-13)) < 1e-10);
    }
  }
}

TEST_CASE("Strang step with zero nonlinearity is the free flow") {
  const ModelParams m = params(2.0, 0.0, 0.5);
  const Grid1D g(32.0, 1024);
  const SpectralOps ops(g);
  const ComplexField u0 = initial_field(m, g);
  ComplexField u = u0;
  for (int n = 0; n < 10; ++n) u = strang_step(u, 0.1, m, ops).field;
  CHECK(max_abs_diff(u.values, ops.free_propagate(u0, 1.0).values) < 1e-13);
}

TEST_CASE("Strang step is second order") {
  const ModelParams m = params(2.0, -kI, 0.5);
  const Grid1D g(32.0, 1024);
  const SpectralOps ops(g);
  const ComplexField u0 = initial_field(m, g);
  const ComplexField a = strang_to(u0, 1.0, 20, m, ops);
  const ComplexField b = strang_to(u0, 1.0, 40, m, ops);
  const ComplexField c = strang_to(u0, 1.0, 80, m, ops);
  const double order = std::log2(l2_norm(a - b) / l2_norm(b - c));
  CHECK(order >= 1.9);
  CHECK(order <= 2.1);
}

TEST_CASE("mass is conserved for real lambda") {
  const Trajectory tr = evolve(config(params(2.0, 1.0, 0.2), 5.0, 11));
  REQUIRE(tr.termination == Termination::reached_t_end);
  const double m0 = tr.records.front().mass;
  for (const auto& r : tr.records) CHECK(std::abs(r.mass / m0 - 1.0) < 1e-10);
}

TEST_CASE("zero nonlinearity keeps the X norm at eps * sigma") {
  const Trajectory tr = evolve(config(params(2.0, 0.0, 0.3), 6.0, 7));
  const double target = tr.records.front().norms.sigma;
  for (const auto& r : tr.records) CHECK(std::abs(r.norms.x_norm / target - 1.0) < 1e-9);
}

TEST_CASE("mass law: d/dt ||u||^2 = 2 Im(lambda) int |u|^{p+1}") {
  for (double im : {-1.0, 1.0}) {
    const ModelParams m = params(2.5, cplx(0.3, im), 0.3);
    SolverConfig c = config(m, 1.0, 2);
    c.record_times = {0.5 - 1e-3, 0.5, 0.5 + 1e-3};
    const Trajectory tr = evolve(c);
    REQUIRE(tr.records.size() >= 3);
    const auto& r = tr.records;
    const std::size_t k = r.size() - 3;
    const double rate = (r[k + 2].mass - r[k].mass) / (r[k + 2].t - r[k].t);
    CHECK(rate * im > 0.0);
    CHECK(rate == doctest::Approx(2.0 * im * r[k + 1].power_integral).epsilon(1e-3));
  }
}

TEST_CASE("absorbing nonlinearity: mass decreases and sup decays") {
  const auto samples = decay_run(params(2.5, -kI, 0.5), 50.0, 26, SolverKnobs{});
  double worst = 0.0;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    CHECK(samples[k].mass <= samples[k - 1].mass);
    worst = std::max(worst, samples[k].weighted);
  }
  // Bounded: the weighted sup stays within a fixed multiple of its initial value.
  CHECK(worst <= 2.0 * samples.front().weighted);
}

TEST_CASE("focusing-growth nonlinearity blows up in finite time") {
  const ModelParams m = params(2.0, kI, 0.5);
  SolverConfig c = lifespan_config(m, SolverKnobs{});
  const LifespanEstimate e = estimate_lifespan(c);
  CHECK(e.status == LifespanStatus::blowup);
  CHECK(std::isfinite(e.T_num));
  CHECK(e.T_lower < e.T_num);
  CHECK((e.T_num - e.T_lower) <= 1e-3 * e.T_num * (1.0 + 1e-12));
  CHECK(e.termination == Termination::blowup_amplitude);
}

TEST_CASE("scaled life span moves toward 0.25 as eps decreases") {
  const double s4 = lifespan_record(params(2.0, kI, 0.4), SolverKnobs{}).scaled;
  const double s2 = lifespan_record(params(2.0, kI, 0.2), SolverKnobs{}).scaled;
  CHECK(std::abs(s2 - 0.25) < std::abs(s4 - 0.25));
  CHECK(s2 >= 0.25 * 0.8);
}

TEST_CASE("negative Im(lambda) reports no blow-up") {
  SolverKnobs k;
  k.t_end = 5.0;
  const SolverConfig c = lifespan_config(params(2.0, -kI, 0.5), k);
  const LifespanEstimate e = estimate_lifespan(c);
  CHECK(e.status == LifespanStatus::no_blowup_expected);
  CHECK(std::isinf(e.T_num));
  CHECK(e.t_reached == doctest::Approx(5.0));
}

TEST_CASE("an undersized domain is reported, not hidden") {
  SolverKnobs k;
  k.t_end = 20.0;
  k.grid = Grid1D(12.0, 256);
  SolverConfig c = lifespan_config(params(2.0, 0.0, 0.5), k);
  c.record_times = {10.0, 20.0};
  CHECK_THROWS_AS(evolve(c), DomainError);
  CHECK(estimate_lifespan(c).status == LifespanStatus::horizon_exhausted);
}

TEST_CASE("config validation") {
  SolverConfig c;
  c.dt_floor = 0.1;
  c.dt_initial = 0.01;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

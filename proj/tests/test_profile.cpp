#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lifespan/csv.hpp"
#include "lifespan/error.hpp"
#include "lifespan/profile.hpp"
#include "lifespan/spectral.hpp"
#include "test_support.hpp"

using namespace lifespan;

namespace {

const cplx kI(0.0, 1.0);
const cplx kQuarterTurn = std::polar(1.0, -std::numbers::pi / 4.0);

ModelParams base(double p = 2.0, cplx lambda = kI, double eps = 0.5) {
  ModelParams m;
  m.p = p;
  m.lambda = lambda;
  m.epsilon = eps;
  return m;
}

std::size_t nearest(const XiGrid& g, double xi) {
  return static_cast<std::size_t>(std::lround((xi - g.start) / g.spacing));
}

}  // namespace

TEST_CASE("closed-form transforms of the analytic profiles") {
  InitialProfile g = InitialProfile::gaussian();
  CHECK(std::abs(g.hat(0.7) - std::exp(-0.245)) < 1e-15);
  CHECK(*g.hat_sup_closed_form() == 1.0);

  InitialProfile s;
  s.kind = ProfileKind::sech;
  const double sq = std::sqrt(std::numbers::pi / 2.0);
  for (double xi : {0.0, 0.5, 2.0}) {
    CHECK(std::abs(s.hat(xi) - sq / std::cosh(std::numbers::pi * xi / 2.0)) < 1e-14);
  }

  InitialProfile h;
  h.kind = ProfileKind::hermite1;
  for (double xi : {-1.0, 0.3}) CHECK(std::abs(h.hat(xi) - (-kI * xi * std::exp(-xi * xi / 2.0))) < 1e-14);
  CHECK(h.hat_sup() == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("shifted, modulated gaussian against direct quadrature of samples") {
  const InitialProfile g = InitialProfile::gaussian(1.3, 0.8, 0.4, 1.5);
  const Grid1D grid(20.0, 1024);
  const ComplexField u = g.sample(grid);
  const InitialProfile sampled = InitialProfile::sampled(20.0, u.values);
  for (double xi : {0.0, 1.2, 1.5, 2.9}) {
    CHECK(std::abs(sampled.hat(xi) - g.hat(xi)) < 1e-12);
    CHECK(std::abs(sampled.hat_derivative(xi) - g.hat_derivative(xi)) < 1e-10);
  }
  MESSAGE(format_double(sampled.hat_sup()) << " vs " << format_double(*g.hat_sup_closed_form()));
  CHECK(sampled.hat_sup() == doctest::Approx(*g.hat_sup_closed_form()).epsilon(1e-9));
}

TEST_CASE("hat derivative is -i (x phi)^") {
  InitialProfile s;
  s.kind = ProfileKind::sech;
  s.width = 1.5;
  s.wavenumber = -0.5;
  const double h = 1e-4;
  for (double xi : {-1.0, 0.0, 0.8}) {
    const cplx fd = (s.hat(xi + h) - s.hat(xi - h)) / (2.0 * h);
    CHECK(std::abs(fd - s.hat_derivative(xi)) < 1e-7);
  }
}

TEST_CASE("blow-up constant A") {
  CHECK(blowup_constant_A(2.0, kI, 1.0) == 1.0);
  CHECK(blowup_constant_A(2.5, 2.0 * kI, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(std::isinf(blowup_constant_A(2.0, -kI, 1.0)));
  CHECK(std::isinf(blowup_constant_A(2.0, 1.0, 1.0)));
  CHECK(blowup_constant_A(base()) == 1.0);

  SpectralOps ops(Grid1D(32.0, 2048));
  CHECK(blowup_constant_A(base(), ops) == doctest::Approx(1.0).epsilon(1e-12));
  // Too coarse a grid leaves energy in the top octave.
  SpectralOps coarse(Grid1D(32.0, 64));
  CHECK_THROWS_AS(sup_hat_on_grid(InitialProfile::gaussian(1.0, 0.2), coarse), ResolutionError);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(base(2.5).validate());
  CHECK_THROWS_AS(base(3.0 - 1e-9).validate(), InvalidArgument);
  CHECK_THROWS_AS(base(1.9).validate(), InvalidArgument);
  CHECK_THROWS_AS(base(2.0, kI, -0.1).validate(), InvalidArgument);
  ModelParams m = base();
  m.B_over_A = 1.0;
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  CHECK(base(2.0, kI, 0.0625).delta_value() == doctest::Approx(0.5));
}

TEST_CASE("time change s(t)") {
  CHECK(s_of_t(0.0, 2.0, 0.5) == 0.0);
  CHECK(s_of_t(1.0, 2.0, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  for (double eps : {0.5, 0.2, 0.05}) {
    CHECK(t_of_s(1.0, 2.0, eps) == doctest::Approx(0.25 / (eps * eps)).epsilon(1e-14));
  }
  CHECK(t_of_s(s_of_t(3.7, 2.6, 0.3), 2.6, 0.3) == doctest::Approx(3.7).epsilon(1e-13));
}

TEST_CASE("profile at s = 0 is e^{-i pi/4} hat phi") {
  const ProfileModel pm(base(2.5, cplx(0.3, 1.0)), 1e-2, true);
  const ProfileEval e = pm.eval(0.0);
  for (std::size_t i = 0; i < e.V.size(); i += 97) {
    CHECK(std::abs(e.V[i] - kQuarterTurn * pm.hat()[i]) < 1e-15);
  }
}

TEST_CASE("purely imaginary lambda: closed form at the peak") {
  const ProfileModel pm(base(), 1e-3, false);
  const std::size_t i0 = nearest(pm.grid(), 0.0);
  REQUIRE(std::abs(pm.grid().at(i0)) < 1e-12);
  for (double s : {0.2, 0.5, 0.85}) {
    const ProfileEval e = pm.eval(s);
    CHECK(e.W[i0] == doctest::Approx(1.0 - s).epsilon(1e-14));
    CHECK(std::abs(e.V[i0]) == doctest::Approx(1.0 / (1.0 - s)).epsilon(1e-14));
    for (std::size_t i = 0; i < e.G.size(); i += 101) CHECK(e.G[i] == doctest::Approx(-std::numbers::pi / 4.0));
  }
  CHECK_THROWS_AS(pm.eval(0.95), BlowupError);
}

TEST_CASE("scalar RK4 oracle: closed form and modulus conservation") {
  const cplx v = rk4_scalar(kQuarterTurn, 0.5, 2.0, kI);
  CHECK(std::abs(v) == doctest::Approx(2.0).epsilon(1e-8));
  const cplx w = rk4_scalar(cplx(0.6, -0.3), 3.0, 2.4, cplx(1.7, 0.0));
  CHECK(std::abs(std::abs(w) - std::abs(cplx(0.6, -0.3))) < 1e-10);
}

TEST_CASE("closed form agrees with the RK4 oracle on random parameters") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    ModelParams m = base(2.0 + 0.99 * U(rng), cplx(2.0 * U(rng) - 1.0, 0.2 + U(rng)));
    m.profile = InitialProfile::gaussian(0.5 + U(rng), 0.6 + U(rng), 0.0, U(rng) - 0.5);
    const ProfileModel pm(m, 0.05, false);
    const double s = U(rng) * pm.B();
    const auto rk = rk4_oracle(s, m, pm.grid());
    const ProfileEval e = pm.eval(s);
    CHECK(test::max_abs_diff(rk, e.V) < 1e-8);
  }
}

TEST_CASE("real lambda conserves the modulus") {
  ModelParams m = base(2.3, cplx(-1.2, 0.0));
  m.B = 5.0;
  const ProfileModel pm(m, 0.02, true);
  const ProfileEval e = pm.eval(5.0);
  double drift = 0.0;
  for (std::size_t i = 0; i < e.V.size(); ++i) drift = std::max(drift, std::abs(std::abs(e.V[i]) - std::abs(pm.hat()[i])));
  CHECK(drift < 1e-10);
  const auto rk = rk4_oracle(5.0, m, pm.grid());
  for (std::size_t i = 0; i < rk.size(); i += 50) CHECK(std::abs(std::abs(rk[i]) - std::abs(pm.hat()[i])) < 1e-10);
}

TEST_CASE("modulus law for the mollified profile") {
  const ModelParams m = base(2.5, cplx(0.4, 1.0), 0.1);
  const ProfileModel pm(m, 2e-3, true);
  const ProfileEval e = pm.eval(0.7 * pm.B());
  for (std::size_t i = 0; i < e.V.size(); i += 13) {
    CHECK(std::abs(e.V[i]) == doctest::Approx(std::pow(e.W[i], -1.0 / 1.5) * std::abs(pm.hat()[i])).epsilon(1e-13));
    CHECK(1.0 / e.W[i] <= pm.A() / (pm.A() - pm.B()) * (1.0 + 1e-12));
  }
}

TEST_CASE("profile residual: zero unmollified, finite-difference order when mollified") {
  const ModelParams m = base(2.0, kI, 0.3 * 0.3 * 0.3 * 0.3);
  const ProfileModel plain(m, 2e-3, false);
  // Only the centred difference error remains: it falls by four per halving.
  const double p1 = profile_residual(plain, 0.5, 2e-3).max_gap;
  const double p2 = profile_residual(plain, 0.5, 1e-3).max_gap;
  CHECK(p1 / p2 == doctest::Approx(4.0).epsilon(1e-3));
  for (const auto& r : plain.eval(0.5).residual) CHECK(r == cplx(0.0));

  const ProfileModel moll(m, 2e-3, true);
  const double g1 = profile_residual(moll, 0.5, 1e-2).max_gap;
  const double g2 = profile_residual(moll, 0.5, 5e-3).max_gap;
  CHECK(std::log2(g1 / g2) >= 1.9);
}

TEST_CASE("s-derivative of the phase factor matches a difference quotient") {
  const ModelParams m = base(2.4, cplx(0.5, 0.8), 0.1);
  const ProfileModel pm(m, 5e-3, true);
  const double s = 0.5 * pm.B(), h = 1e-4;
  const auto a = pm.phase_factor(s + h, 1.0);
  const auto b = pm.phase_factor(s - h, 1.0);
  const auto d = pm.phase_factor_ds(s);
  for (std::size_t i = 0; i < d.size(); i += 31) CHECK(std::abs((a[i] - b[i]) / (2.0 * h) - d[i]) < 1e-6);
}

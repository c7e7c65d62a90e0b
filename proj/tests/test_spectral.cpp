#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lifespan/error.hpp"
#include "lifespan/fft.hpp"
#include "lifespan/numerics.hpp"
#include "lifespan/spectral.hpp"
#include "test_support.hpp"

using namespace lifespan;
using lifespan::test::max_abs_diff;
using lifespan::test::rel_l2;
using lifespan::test::sample;

namespace {

const Grid1D kDesk(32.0, 2048);
const double kQuarterPi = std::pow(std::numbers::pi, 0.25);

cplx gaussian(double x) { return std::exp(-x * x / 2.0); }

// U(t) e^{-x^2/2} = (1 + it)^{-1/2} exp(-x^2 / (2 (1 + it))).
cplx free_gaussian(double x, double t) {
  const cplx z(1.0, t);
  return std::exp(-x * x / (2.0 * z)) / std::sqrt(z);
}

}  // namespace

TEST_CASE("fft plan round trip and unnormalised convention") {
  auto plan = FftPlan::for_size(8);
  std::vector<cplx> in(8, 0.0), out(8), back(8);
  in[1] = 1.0;
  plan->forward(in, out);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(std::abs(out[k] - std::polar(1.0, -2.0 * std::numbers::pi * k / 8.0)) < 1e-15);
  }
  plan->backward(out, back);
  CHECK(std::abs(back[1] - 8.0) < 1e-14);
  CHECK(FftPlan::for_size(8).get() == plan.get());
}

TEST_CASE("gaussian transform matches the closed form") {
  SpectralOps ops(kDesk);
  const Spectrum s = ops.fourier_transform(sample(kDesk, gaussian));
  double err = 0.0;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    err = std::max(err, std::abs(s.values[k] - std::exp(-s.xi(k) * s.xi(k) / 2.0)));
  }
  CHECK(err < 1e-10);
}

TEST_CASE("zero field transforms to zero") {
  SpectralOps ops(kDesk);
  const Spectrum s = ops.fourier_transform(ComplexField(kDesk));
  for (const auto& v : s.values) CHECK(v == cplx(0.0));
}

TEST_CASE("modulated gaussian: shift theorem and direct quadrature agree") {
  SpectralOps ops(kDesk);
  const ComplexField u = sample(kDesk, [](double x) { return std::exp(cplx(0.0, x)) * gaussian(x); });
  const Spectrum s = ops.fourier_transform(u);
  for (std::size_t k = 900; k < 1200; k += 37) {
    const double xi = s.xi(k);
    cplx direct = 0.0;
    for (std::size_t j = 0; j < kDesk.size(); ++j) {
      direct += std::exp(cplx(0.0, -kDesk.x(j) * xi)) * u.values[j];
    }
    direct *= kInvSqrtTwoPi * kDesk.dx();
    CHECK(std::abs(s.values[k] - std::exp(-(xi - 1.0) * (xi - 1.0) / 2.0)) < 1e-10);
    CHECK(std::abs(s.values[k] - direct) < 1e-10);
  }
}

TEST_CASE("round trip and Plancherel on random fields") {
  SpectralOps ops(Grid1D(10.0, 256));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    ComplexField u(ops.grid());
    for (auto& v : u.values) v = cplx(nd(rng), nd(rng));
    const Spectrum s = ops.fourier_transform(u);
    const ComplexField back = ops.inverse_fourier_transform(s);
    CHECK(rel_l2(back.values, u.values) < 1e-12);
    double e_hat = 0.0;
    for (const auto& v : s.values) e_hat += std::norm(v);
    e_hat *= ops.grid().dxi();
    CHECK(std::abs(std::sqrt(e_hat) / l2_norm(u) - 1.0) < 1e-12);
  }
}

TEST_CASE("non-finite input is rejected") {
  SpectralOps ops(Grid1D(10.0, 64));
  ComplexField u(ops.grid());
  u.values[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ops.fourier_transform(u), NonFiniteError);
  CHECK_THROWS_AS(ops.free_propagate(u, 1.0), NonFiniteError);
}

TEST_CASE("free propagation matches the closed-form gaussian") {
  SpectralOps ops(kDesk);
  const ComplexField u0 = sample(kDesk, gaussian);
  for (double t : {0.5, 1.0, 3.0}) {
    const ComplexField u = ops.free_propagate(u0, t);
    CHECK(u.time == doctest::Approx(t));
    double err = 0.0;
    for (std::size_t j = 0; j < kDesk.size(); ++j) err = std::max(err, std::abs(u.values[j] - free_gaussian(kDesk.x(j), t)));
    CHECK(err < 1e-9);
  }
  // Group property and adjoint.
  const ComplexField a = ops.free_propagate(ops.free_propagate(u0, 0.4), 0.9);
  const ComplexField b = ops.free_propagate(u0, 1.3);
  CHECK(max_abs_diff(a.values, b.values) < 1e-13);
  const ComplexField c = ops.free_propagate(ops.free_propagate(u0, 0.7), -0.7);
  CHECK(max_abs_diff(c.values, u0.values) < 1e-13);
}

TEST_CASE("M(t) is unimodular and inverts") {
  SpectralOps ops(Grid1D(10.0, 128));
  const ComplexField one = sample(ops.grid(), [](double) { return cplx(1.0); });
  const ComplexField m = ops.apply_M(one, 1.0, +1);
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double x = ops.grid().x(j);
    CHECK(std::abs(m.values[j] - std::exp(cplx(0.0, x * x / 2.0))) < 1e-14);
  }
  const ComplexField u = sample(ops.grid(), [](double x) { return cplx(x, 1.0) * gaussian(x); });
  const ComplexField back = ops.apply_M(ops.apply_M(u, 0.6, +1), 0.6, -1);
  CHECK(max_abs_diff(back.values, u.values) < 1e-14);
}

TEST_CASE("J operator: t = 0, two routes, commutation with U(t)") {
  SpectralOps ops(kDesk);
  const ComplexField phi = sample(kDesk, gaussian);
  const ComplexField j0 = ops.apply_J(phi, 0.0);
  for (std::size_t j = 0; j < kDesk.size(); ++j) CHECK(j0.values[j] == kDesk.x(j) * phi.values[j]);

  const ComplexField u1 = ops.free_propagate(phi, 1.0);
  CHECK(rel_l2(ops.apply_J(u1, 1.0).values, ops.apply_J_conjugated(u1, 1.0).values) < 1e-8);

  const ComplexField xphi = sample(kDesk, [](double x) { return x * gaussian(x); });
  const ComplexField lhs = ops.apply_J(ops.free_propagate(phi, 0.7), 0.7);
  const ComplexField rhs = ops.free_propagate(xphi, 0.7);
  CHECK(rel_l2(lhs.values, rhs.values) < 1e-10);

  // Linearity.
  const ComplexField sum = ops.apply_J(cplx(2.0, 1.0) * u1 + xphi, 1.0);
  const ComplexField parts = cplx(2.0, 1.0) * ops.apply_J(u1, 1.0) + ops.apply_J(xphi, 1.0);
  CHECK(rel_l2(sum.values, parts.values) < 1e-13);
}

TEST_CASE("norms of the gaussian") {
  SpectralOps ops(kDesk);
  const NormReport z = ops.norms(ComplexField(kDesk), 0.0);
  CHECK(z.x_norm == 0.0);
  CHECK(z.l_inf == 0.0);
  const NormReport n = ops.norms(sample(kDesk, gaussian), 0.0);
  CHECK(n.l2 == doctest::Approx(kQuarterPi).epsilon(1e-13));
  CHECK(n.dx_part == doctest::Approx(kQuarterPi / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(n.j_part == doctest::Approx(kQuarterPi / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(n.sigma == doctest::Approx(kQuarterPi * (1.0 + std::sqrt(2.0))).epsilon(1e-12));
  CHECK(n.x_norm == doctest::Approx(n.l2_part + n.dx_part + n.j_part).epsilon(1e-15));
  CHECK(n.h1 == doctest::Approx(std::hypot(n.l2, n.dx_part)).epsilon(1e-15));
}

TEST_CASE("free evolution conserves the X norm") {
  SpectralOps ops(kDesk);
  const double eps = 0.3;
  const ComplexField u0 = eps * sample(kDesk, gaussian);
  const double sigma = ops.norms(sample(kDesk, gaussian), 0.0).sigma;
  for (double t : {0.0, 1.0, 5.0}) {
    const double xn = ops.norms(ops.free_propagate(u0, t), t).x_norm;
    CHECK(std::abs(xn / (eps * sigma) - 1.0) < 1e-9);
  }
}

TEST_CASE("spectral derivative of a gaussian") {
  SpectralOps ops(kDesk);
  const ComplexField d = ops.derivative(sample(kDesk, gaussian), 2);
  double err = 0.0;
  for (std::size_t j = 0; j < kDesk.size(); ++j) {
    const double x = kDesk.x(j);
    err = std::max(err, std::abs(d.values[j] - (x * x - 1.0) * gaussian(x)));
  }
  CHECK(err < 1e-11);
}

TEST_CASE("boundary check fires on wide data") {
  SpectralOps ops(Grid1D(6.0, 256));
  CHECK_NOTHROW(ops.check_boundary(sample(ops.grid(), [](double x) { return gaussian(x / 0.5); }), 1e-12, "t"));
  CHECK_THROWS_AS(ops.check_boundary(sample(ops.grid(), gaussian), 1e-12, "t"), DomainError);
}

TEST_CASE("grid rule scales with the horizon") {
  const Grid1D g = grid_for_horizon(10.0, 2.0, 8.0);
  CHECK(g.half_width() >= 8.0 + 4.0 * 10.0 * 2.0);
  CHECK(g.nyquist() >= 8.0);
  CHECK(grid_for_horizon(0.0, 2.0, 8.0).half_width() == 32.0);
}

TEST_CASE("numerics helpers") {
  const std::vector<double> x{1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -2.0));
  const LinearFit f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));

  const XiGrid g{0.0, 0.01, 401};
  std::vector<double> s(g.count);
  for (std::size_t i = 0; i < g.count; ++i) s[i] = std::sin(g.at(i));
  const auto d = fd_derivative(std::span<const double>(s), g.spacing, 1);
  CHECK(std::abs(d[200] - std::cos(2.0)) < 1e-9);
  CHECK(std::abs(cubic_interpolate(std::span<const double>(s), g, 1.2345) - std::sin(1.2345)) < 1e-8);
  CHECK(cubic_interpolate(std::span<const double>(s), g, -1.0) == 0.0);

  const auto ls = log_spaced(1e-3, 1.0, 4);
  CHECK(ls[1] == doctest::Approx(1e-2));
}

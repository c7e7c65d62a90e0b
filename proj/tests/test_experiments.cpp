#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lifespan/bounds.hpp"
#include "lifespan/config.hpp"
#include "lifespan/csv.hpp"
#include "lifespan/error.hpp"
#include "lifespan/experiments.hpp"
#include "lifespan/property_suites.hpp"

using namespace lifespan;

TEST_CASE("theoretical bound") {
  const TheoreticalBound b = theoretical_bound(2.0, cplx(0.0, 1.0), 1.0);
  CHECK(b.A == 1.0);
  CHECK(*b.liminf_const == 0.25);
  CHECK(std::isinf(*theoretical_bound(2.0, cplx(0.0, -1.0), 1.0).liminf_const));
  CHECK(std::isinf(*theoretical_bound(2.5, cplx(1.0, 0.0), 1.0).liminf_const));
  const TheoreticalBound p3 = theoretical_bound(3.0, cplx(0.0, 1.0), 1.0);
  CHECK(*p3.p3_log_bound == 0.5);
  CHECK_FALSE(p3.liminf_const);
  // T_B with B = A reproduces t_of_s(A).
  const TheoreticalBound tb = theoretical_bound(2.0, cplx(0.0, 1.0), 1.0, 0.2, 1.0);
  CHECK(*tb.T_B == doctest::Approx(t_of_s(1.0, 2.0, 0.2)).epsilon(1e-14));
  CHECK(*tb.T_B == doctest::Approx(0.25 / 0.04).epsilon(1e-14));
  CHECK(lifespan_exponent(2.0) == 2.0);
}

TEST_CASE("round-trip number formatting") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) CHECK(parse_double(format_double(v)) == v);
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isnan(parse_double("nan")));
  CHECK_THROWS_AS(parse_double("1.5x"), InvalidArgument);
  std::ostringstream os;
  write_csv_row(os, {"a", "b,c", "d\"e"});
  CHECK(os.str() == "a,\"b,c\",\"d\"\"e\"\n");
  const auto cells = split_csv_line("a,\"b,c\",\"d\"\"e\"");
  REQUIRE(cells.size() == 3);
  CHECK(cells[1] == "b,c");
  CHECK(cells[2] == "d\"e");
}

TEST_CASE("sweep CSV round trip and determinism") {
  SweepSettings s;
  s.eps = {0.5, 0.4};
  s.threads = 2;
  const SweepResult a = sweep_lifespan(s);
  const SweepResult b = sweep_lifespan(s);
  REQUIRE_FALSE(a.partial);
  std::ostringstream oa, ob;
  write_sweep_csv(oa, a);
  write_sweep_csv(ob, b);
  CHECK(oa.str() == ob.str());
  CHECK(oa.str().rfind("eps,T_num,scaled,bound_const,ratio,termination,L,N,dt_floor,K_b,B_over_A,schema_version\n", 0) == 0);
  std::istringstream is(oa.str());
  const auto rows = read_sweep_csv(is);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].T_num == a.records[1].T_num);
  CHECK(rows[1].N == a.records[1].N);
  CHECK(rows[0].termination == "blowup_amplitude");
  CHECK(a.expected_slope == -2.0);
}

TEST_CASE("a sweep with a failing run is marked partial") {
  SweepSettings s;
  s.eps = {0.5, 0.4};
  s.knobs.grid = Grid1D(4.0, 64);
  const SweepResult r = sweep_lifespan(s);
  CHECK(r.partial);
  std::ostringstream os;
  write_sweep_csv(os, r);
  CHECK(os.str().rfind("# PARTIAL", 0) == 0);
}

TEST_CASE("config parsing") {
  const RunConfig d = parse_run_config("{}");
  CHECK(d.model.p == 2.0);
  CHECK(d.sweep_eps.size() == 5);
  const RunConfig c = parse_run_config(R"({"model": {"p": 2.5, "lambda": [0.5, 2], "epsilon": 0.2,
      "profile": {"kind": "sech", "width": 1.5}}, "solver": {"K_b": 20}, "seed": 7})");
  CHECK(c.model.p == 2.5);
  CHECK(c.model.lambda == cplx(0.5, 2.0));
  CHECK(c.model.profile.kind == ProfileKind::sech);
  CHECK(c.solver.K_b == 20.0);
  CHECK(c.seed == 7);
  CHECK_THROWS_AS(parse_run_config(R"({"model": {"lamda": [0, 1]}})"), InvalidArgument);
  CHECK_THROWS_AS(parse_run_config(R"({"extra": 1})"), InvalidArgument);
  CHECK_THROWS_AS(parse_run_config(R"({"model": {"p": 3.0}})"), InvalidArgument);
  CHECK_THROWS_AS(parse_run_config("{"), InvalidArgument);

  const RunConfig again = parse_run_config(dump_run_config(c));
  CHECK(dump_run_config(again) == dump_run_config(c));
}

TEST_CASE("bound check fits one constant and flags outliers") {
  std::vector<double> lhs, rhs, keys;
  for (int i = 1; i <= 100; ++i) {
    rhs.push_back(1.0 / i);
    lhs.push_back(3.0 / i);
    keys.push_back(i);
  }
  BoundCheck ok = check_bound("c", lhs, rhs, keys);
  CHECK(ok.passed);
  CHECK(ok.fitted_constant == doctest::Approx(3.0));
  CHECK(ok.calibration_samples == 50);
  lhs[0] = 30.0;
  CHECK_FALSE(check_bound("c", lhs, rhs, keys).passed);
  BoundOptions o;
  o.ceiling = 2.0;
  lhs[0] = 3.0;
  CHECK_FALSE(check_bound("c", lhs, rhs, keys, o).passed);
}

TEST_CASE("property harness fails when the lemma constant is shrunk") {
  PropertyOptions o;
  o.lemma_pairs = 20000;
  const auto ok = run_property_suites(o, {"pointwise_lemma"});
  CHECK(ok.passed);
  o.lemma_scale = 0.1;
  const auto bad = run_property_suites(o, {"pointwise_lemma"});
  CHECK_FALSE(bad.passed);
  CHECK(to_json(bad).find("\"fitted_constant\"") != std::string::npos);
  CHECK_THROWS_AS(run_property_suites(o, {"nope"}), InvalidArgument);
}

TEST_CASE("worker pool rethrows the first error") {
  std::vector<int> hit(10, 0);
  parallel_for(10, 3, [&](std::size_t i) { hit[i] = 1; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 4) throw DomainError("x"); }), DomainError);
}

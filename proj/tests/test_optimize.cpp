#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "iqdesign/errors.hpp"
#include "iqdesign/optimize.hpp"
#include "iqdesign/presets.hpp"
#include "test_support.hpp"

using namespace iqdesign;

TEST_CASE("case-study optimal designs reproduce the published table") {
  const Preset& land = preset("landete");

  SUBCASE("D") {
    const SolveResult r = optimal_design(land.model, Criterion::d(), land.space);
    CHECK(r.design.points[0] == doctest::Approx(1.0));
    CHECK(r.design.points[1] == doctest::Approx(3.4089).epsilon(3e-4));
    CHECK(r.design.points[2] == doctest::Approx(14.0));
    for (double w : r.design.weights) CHECK(w == doctest::Approx(1.0 / 3.0));
    CHECK(r.report.passed);
  }
  SUBCASE("E") {
    const SolveResult r = optimal_design(land.model, Criterion::e(), land.space);
    CHECK(r.design.points[1] == doctest::Approx(3.3561).epsilon(3e-4));
    CHECK(r.design.weights[0] == doctest::Approx(0.3972).epsilon(3e-3));
    CHECK(r.design.weights[1] == doctest::Approx(0.3914).epsilon(3e-3));
    CHECK(r.design.weights[2] == doctest::Approx(0.2114).epsilon(3e-3));
    CHECK(r.report.passed);
  }
  SUBCASE("extrapolation at 21") {
    const SolveResult r =
        optimal_design(land.model, Criterion::extrapolation(21.0), land.space);
    CHECK(r.design.points[1] == doctest::Approx(3.3561).epsilon(3e-4));
    CHECK(r.design.weights[0] == doctest::Approx(0.0582).epsilon(5e-3));
    CHECK(r.design.weights[1] == doctest::Approx(0.1535).epsilon(5e-3));
    CHECK(r.design.weights[2] == doctest::Approx(0.7883).epsilon(5e-3));
    CHECK(r.report.passed);
  }
}

TEST_CASE("unconstrained spaces dispatch to the closed form") {
  const ModelSpec simple{ModelKind::P1, {1.0, 0.0, 1.0}};
  const DesignSpace space{0.0, std::numeric_limits<double>::infinity()};
  const SolveResult r = optimal_design(simple, Criterion::d(), space);
  CHECK(r.design.points[2] == doctest::Approx(3.043738).epsilon(1e-6));
  CHECK(r.report.passed);
}

TEST_CASE("extrapolation point inside the space is rejected") {
  const Preset& land = preset("landete");
  CHECK_THROWS_AS(
      optimal_design(land.model, Criterion::extrapolation(5.0), land.space),
      ValidationError);
}

TEST_CASE("degenerate space is rejected") {
  const Preset& land = preset("landete");
  CHECK_THROWS_AS(optimal_design(land.model, Criterion::d(), {3.0, 3.0}),
                  UnsupportedSpace);
}

TEST_CASE("general c vector on a bounded space") {
  const Preset& land = preset("landete");
  // c = f(21) routed through the general-c path matches the extrapolation path.
  const SolveResult via_c = optimal_design(
      land.model, Criterion::c_vector(gradient(land.model, 21.0)), land.space);
  const SolveResult via_ce =
      optimal_design(land.model, Criterion::extrapolation(21.0), land.space);
  for (int i = 0; i < 3; ++i) {
    CHECK(via_c.design.points[i] ==
          doctest::Approx(via_ce.design.points[i]).epsilon(1e-6));
    CHECK(via_c.design.weights[i] ==
          doctest::Approx(via_ce.design.weights[i]).epsilon(1e-6));
  }
}

TEST_CASE("grid oracle") {
  const Preset& land = preset("landete");
  SUBCASE("degenerate three-point grid") {
    const Design d = grid_oracle(land.model, Criterion::d(), land.space, 3);
    CHECK(d.points[0] == doctest::Approx(1.0));
    CHECK(d.points[1] == doctest::Approx(7.5));
    CHECK(d.points[2] == doctest::Approx(14.0));
  }
  SUBCASE("201-point grid brackets the published middle point") {
    const Design d = grid_oracle(land.model, Criterion::d(), land.space, 201);
    const double step = 13.0 / 200.0;
    CHECK(d.points[0] == doctest::Approx(1.0));
    CHECK(std::abs(d.points[1] - 3.4089) <= step + 1e-12);
    CHECK(d.points[2] == doctest::Approx(14.0));
  }
  SUBCASE("unbounded spaces are rejected") {
    CHECK_THROWS_AS(
        grid_oracle(land.model, Criterion::d(),
                    {0.0, std::numeric_limits<double>::infinity()}, 11),
        UnsupportedSpace);
  }
}

TEST_CASE("solver dominates the grid oracle") {
  std::mt19937_64 rng(4242);
  const Criterion crits[4] = {Criterion::d(), Criterion::e(), Criterion::d1(),
                              Criterion::extrapolation(1.0)};
  for (int trial = 0; trial < 5; ++trial) {
    const ModelSpec model = trial % 2 ? test::random_p1(rng) : test::random_p2(rng);
    const double p = peak_location(model);
    const DesignSpace space{0.35 * p, 4.0 * p};
    Criterion crit = crits[trial % 3];  // D, E, D1 here; ce covered below
    const SolveResult solved = optimal_design(model, crit, space);
    const Design oracle = grid_oracle(model, crit, space, 101);
    const double v_solved = criterion_value(solved.design, crit, model);
    const double v_oracle = criterion_value(oracle, crit, model);
    REQUIRE(v_solved >= v_oracle * (1.0 - 1e-9));
  }
  // Extrapolation (minimization) dominance.
  const ModelSpec model = test::random_p1(rng);
  const double p = peak_location(model);
  const DesignSpace space{0.35 * p, 4.0 * p};
  const Criterion ce = Criterion::extrapolation(8.0 * p);
  const SolveResult solved = optimal_design(model, ce, space);
  const Design oracle = grid_oracle(model, ce, space, 101);
  REQUIRE(criterion_value(solved.design, ce, model) <=
          criterion_value(oracle, ce, model) * (1.0 + 1e-9));
}

TEST_CASE("pinned points are respected") {
  const Preset& land = preset("landete");
  const SolveResult r = optimal_design(land.model, Criterion::d1(), land.space);
  CHECK(r.design.points[0] == 1.0);
  CHECK(r.design.points[2] == 14.0);

  const double p = peak_location(land.model);
  const double rho = scaling_factor_d1(gamma_factor(land.model)).rho;
  const DesignSpace lower_pinned{p / rho * 1.5, rho * p * 2.0};
  CHECK(classify_interval(land.model, Criterion::d1(), lower_pinned) ==
        IntervalForm::LowerPinned);
  const SolveResult r2 = optimal_design(land.model, Criterion::d1(), lower_pinned);
  CHECK(r2.design.points[0] == lower_pinned.s);
  CHECK(r2.design.points[2] < lower_pinned.t);
  CHECK(r2.report.passed);
}

TEST_CASE("determinism") {
  const Preset& land = preset("landete");
  const SolveResult a = optimal_design(land.model, Criterion::e(), land.space);
  const SolveResult b = optimal_design(land.model, Criterion::e(), land.space);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.design.points[i] == b.design.points[i]);
    CHECK(a.design.weights[i] == b.design.weights[i]);
  }
}

TEST_CASE("nested intervals never decrease the optimal value") {
  const ModelSpec model = test::landete_model();
  const double p = peak_location(model);
  double prev_d = 0.0, prev_e = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double half_width = 0.6 + 0.8 * i;
    const DesignSpace space{std::max(0.3, p - half_width), p + 3.0 * half_width};
    const double vd = criterion_value(
        optimal_design(model, Criterion::d(), space).design, Criterion::d(), model);
    const double ve = criterion_value(
        optimal_design(model, Criterion::e(), space).design, Criterion::e(), model);
    REQUIRE(vd >= prev_d * (1.0 - 1e-9));
    REQUIRE(ve >= prev_e * (1.0 - 1e-9));
    prev_d = vd;
    prev_e = ve;
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "iqdesign/chebyshev.hpp"
#include "iqdesign/closed_form.hpp"
#include "iqdesign/errors.hpp"
#include "test_support.hpp"

using namespace iqdesign;

namespace {

void check_equioscillation(const ModelSpec& model, const DesignSpace& space,
                           const ChebyshevSolution& sol) {
  const double signs[3] = {1.0, -1.0, 1.0};
  for (int i = 0; i < 3; ++i)
    REQUIRE(sol.phi(model, sol.points[i]) ==
            doctest::Approx(signs[i] * sol.level).epsilon(1e-8));
  // Interior points are stationary.
  for (int i = 0; i < 3; ++i) {
    const double u = sol.points[i];
    const bool interior = u > space.s && (!space.bounded() || u < space.t);
    if (!interior) continue;
    const double h = 1e-6 * u;
    const double der = (sol.phi(model, u + h) - sol.phi(model, u - h)) / (2 * h);
    const double scale = sol.coefficients.dot(gradient_du(model, u).cwiseAbs());
    REQUIRE(std::abs(der) <= 1e-6 * std::max(1.0, std::abs(scale)));
  }
  // Global bound on a dense grid.
  const double lo = space.bounded() ? space.s : std::max(space.s, 1e-3 * sol.points[0]);
  const double hi = space.bounded() ? space.t : 30.0 * sol.points[2];
  for (int i = 0; i <= 10000; ++i) {
    const double u = space.bounded() ? lo + (hi - lo) * i / 10000.0
                                     : lo * std::pow(hi / lo, i / 10000.0);
    REQUIRE(std::abs(sol.phi(model, u)) <= sol.level + 1e-8);
  }
}

}  // namespace

TEST_CASE("system determinant is nonzero with constant sign") {
  std::mt19937_64 rng(42);
  const ModelSpec simple{ModelKind::P1, {1.0, 0.0, 1.0}};
  CHECK(system_determinant(simple, {1.0, 2.0, 3.0}) != 0.0);
  CHECK_THROWS_AS(system_determinant(simple, {1.0, 1.0, 3.0}), ValidationError);

  for (const ModelSpec& model :
       {test::random_p1(rng), test::random_p2(rng), test::landete_model()}) {
    int sign = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      std::uniform_real_distribution<double> point(0.01, 20.0);
      std::array<double, 3> pts{point(rng) * peak_location(model),
                                point(rng) * peak_location(model),
                                point(rng) * peak_location(model)};
      std::sort(pts.begin(), pts.end());
      if (pts[1] - pts[0] < 1e-6 || pts[2] - pts[1] < 1e-6) continue;
      const double det = system_determinant(model, pts);
      REQUIRE(det != 0.0);
      const int s = det > 0 ? 1 : -1;
      if (sign == 0) sign = s;
      REQUIRE(s == sign);
    }
  }
}

TEST_CASE("A* membership") {
  const ModelSpec land = test::landete_model();
  const DesignSpace space{1.0, 14.0};
  CHECK(in_a_star(Eigen::Vector3d(0, 0, 1), land, space));
  CHECK(in_a_star(gradient(land, 21.0), land, space));
  CHECK(in_a_star(gradient(land, 0.4), land, space));
  // The gradient at an interior point produces equal columns at x1 = u0.
  CHECK_FALSE(in_a_star(gradient(land, 5.0), land, space));
  CHECK_FALSE(in_a_star(gradient(land, 1.7), land, space));

  const ModelSpec p2{ModelKind::P2, {1.0, 1.0, 1.0}};
  const DesignSpace unbounded{0.0, std::numeric_limits<double>::infinity()};
  CHECK(in_a_star(Eigen::Vector3d(0, 0, 1), p2, unbounded));
  CHECK_FALSE(in_a_star(gradient(p2, 2.0), p2, unbounded));
}

TEST_CASE("chebyshev points on the unbounded space match the geometric design") {
  const ModelSpec simple{ModelKind::P1, {1.0, 0.0, 1.0}};
  const DesignSpace space{0.0, std::numeric_limits<double>::infinity()};
  const ChebyshevSolution sol = chebyshev_points(simple, space);
  const double rho = scaling_factor_d1(gamma_factor(simple)).rho;
  CHECK(rho == doctest::Approx(4.611582).epsilon(1e-6));
  CHECK(sol.points[0] == doctest::Approx(1.0 / rho).epsilon(1e-9));
  CHECK(sol.points[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.points[2] == doctest::Approx(rho).epsilon(1e-9));
  check_equioscillation(simple, space, sol);

  const ModelSpec p2{ModelKind::P2, {1.0, 1.0, 1.0}};
  const ChebyshevSolution sol2 = chebyshev_points(p2, space);
  CHECK(sol2.points[1] == doctest::Approx(1.0).epsilon(1e-9));
  check_equioscillation(p2, space, sol2);
}

TEST_CASE("chebyshev points on the case-study interval") {
  const ModelSpec land = test::landete_model();
  const DesignSpace space{1.0, 14.0};
  const ChebyshevSolution sol = chebyshev_points(land, space);
  CHECK(sol.points[0] == doctest::Approx(1.0));
  CHECK(sol.points[1] == doctest::Approx(3.3561).epsilon(2e-4));
  CHECK(sol.points[2] == doctest::Approx(14.0));
  check_equioscillation(land, space, sol);
}

TEST_CASE("closed-form consistency across random models") {
  std::mt19937_64 rng(2024);
  const DesignSpace space{0.0, std::numeric_limits<double>::infinity()};
  for (int trial = 0; trial < 100; ++trial) {
    const ModelSpec model = trial < 50 ? test::random_p1(rng) : test::random_p2(rng);
    const double p = peak_location(model);
    const double rho = scaling_factor_d1(gamma_factor(model)).rho;
    const ChebyshevSolution sol = chebyshev_points(model, space);
    REQUIRE(sol.points[0] == doctest::Approx(p / rho).epsilon(1e-9));
    REQUIRE(sol.points[1] == doctest::Approx(p).epsilon(1e-9));
    REQUIRE(sol.points[2] == doctest::Approx(rho * p).epsilon(1e-9));
  }
}

TEST_CASE("optimal weights reproduce the published case-study rows") {
  const ModelSpec land = test::landete_model();
  const DesignSpace space{1.0, 14.0};
  const ChebyshevSolution sol = chebyshev_points(land, space);

  const auto w_d1 =
      optimal_weights_for_c(sol.points, Eigen::Vector3d(0, 0, 1), land);
  CHECK(w_d1[0] == doctest::Approx(0.1239).epsilon(5e-3));
  CHECK(w_d1[1] == doctest::Approx(0.2884).epsilon(5e-3));
  CHECK(w_d1[2] == doctest::Approx(0.5877).epsilon(5e-3));

  const auto w_ce = optimal_weights_for_c(sol.points, gradient(land, 21.0), land);
  CHECK(w_ce[0] == doctest::Approx(0.0582).epsilon(5e-3));
  CHECK(w_ce[1] == doctest::Approx(0.1535).epsilon(5e-3));
  CHECK(w_ce[2] == doctest::Approx(0.7883).epsilon(5e-3));

  const auto w_e = optimal_weights_for_c(sol.points, sol.coefficients, land);
  CHECK(w_e[0] == doctest::Approx(0.3972).epsilon(5e-3));
  CHECK(w_e[1] == doctest::Approx(0.3914).epsilon(5e-3));
  CHECK(w_e[2] == doctest::Approx(0.2114).epsilon(5e-3));
}

TEST_CASE("weight formula agrees with the closed-form D1 weights") {
  std::mt19937_64 rng(314159);
  const Eigen::Vector3d e3(0, 0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const ModelSpec model = test::random_p1(rng);
    const double p = peak_location(model);
    const double rho = scaling_factor_d1(gamma_factor(model)).rho;
    const auto w = optimal_weights_for_c({p / rho, p, rho * p}, e3, model);
    const auto closed = theorem_d1_weights_p1(model);
    for (int i = 0; i < 3; ++i)
      REQUIRE(std::abs(w[i] - closed[i]) <= 1e-10);
  }
}

TEST_CASE("weights are invariant to scaling c") {
  std::mt19937_64 rng(17);
  const ModelSpec model = test::random_p1(rng);
  const double p = peak_location(model);
  const std::array<double, 3> pts{0.4 * p, p, 3.1 * p};
  const Eigen::Vector3d c(0.3, -1.0, 2.0);
  const auto base = optimal_weights_for_c(pts, c, model);
  for (double k : {-3.0, 0.02, 1e6}) {
    const auto scaled = optimal_weights_for_c(pts, (k * c).eval(), model);
    for (int i = 0; i < 3; ++i)
      CHECK(scaled[i] == doctest::Approx(base[i]).epsilon(1e-12));
  }
}

TEST_CASE("coefficients match the closed-form coefficient vector") {
  std::mt19937_64 rng(8);
  const DesignSpace space{0.0, std::numeric_limits<double>::infinity()};
  for (int trial = 0; trial < 10; ++trial) {
    const ModelSpec model = trial % 2 ? test::random_p1(rng) : test::random_p2(rng);
    const ChebyshevSolution sol = chebyshev_points(model, space);
    const Eigen::Vector3d closed = chebyshev_coefficient_vector(model);
    REQUIRE((sol.coefficients - closed).norm() <= 1e-6 * closed.norm());
  }
}

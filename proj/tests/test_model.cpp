#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "iqdesign/errors.hpp"
#include "iqdesign/model.hpp"
#include "test_support.hpp"

using namespace iqdesign;

namespace {

// Central finite differences of eta in theta, the independent gradient
// oracle. Steps are 1e-6 relative to the parameter scale.
Eigen::Vector3d fd_gradient(const ModelSpec& model, double u, double h = 1e-6) {
  const double scale = std::max({std::abs(model.theta[0]),
                                 std::abs(model.theta[1]),
                                 std::abs(model.theta[2])});
  Eigen::Vector3d g;
  for (int i = 0; i < 3; ++i) {
    ModelSpec up = model, down = model;
    const double step = h * std::max(std::abs(model.theta[i]), 0.01 * scale);
    up.theta[i] += step;
    down.theta[i] -= step;
    g[i] = (eta(up, u) - eta(down, u)) / (2.0 * step);
  }
  return g;
}

}  // namespace

TEST_CASE("validation accepts and rejects per the positivity conditions") {
  CHECK(is_valid({ModelKind::P1, {1.0, 0.0, 1.0}}));
  CHECK(is_valid(test::landete_model()));
  CHECK(is_valid({ModelKind::P2, {1.0, 1.0, 1.0}}));
  CHECK(is_valid({ModelKind::P2, {5.0, 4.0, 1.0}}));

  CHECK_FALSE(is_valid({ModelKind::P1, {-1.0, 0.0, 1.0}}));
  CHECK_FALSE(is_valid({ModelKind::P1, {1.0, 0.0, -1.0}}));
  // theta1 at or below -2 sqrt(theta0 theta2) makes the denominator vanish.
  CHECK_FALSE(is_valid({ModelKind::P1, {1.0, -2.0, 1.0}}));
  CHECK_FALSE(is_valid({ModelKind::P1, {1.0, -3.0, 1.0}}));
  CHECK(is_valid({ModelKind::P1, {1.0, -1.9, 1.0}}));

  CHECK_FALSE(is_valid({ModelKind::P2, {1.0, 0.2, 1.0}}));  // 2 sqrt(t1 t2) < 1
  CHECK_FALSE(is_valid({ModelKind::P2, {-1.0, 1.0, 1.0}}));
  CHECK_THROWS_AS(validate({ModelKind::P1, {1.0, -3.0, 1.0}}), ValidationError);
  CHECK_THROWS_WITH_AS(validate({ModelKind::P2, {1.0, 0.2, 1.0}}),
                       "P2 requires 2*sqrt(theta1*theta2) > 1", ValidationError);
}

TEST_CASE("eta values") {
  CHECK(eta({ModelKind::P1, {1.0, 0.0, 1.0}}, 1.0) == doctest::Approx(0.5));
  CHECK(eta({ModelKind::P2, {1.0, 1.0, 1.0}}, 1.0) == doctest::Approx(1.0 / 3.0));
  CHECK(eta({ModelKind::P1, {1.0, 0.0, 1.0}}, 0.0) == 0.0);

  const ModelSpec land = test::landete_model();
  const double peak = peak_location(land);
  // Peak height equals 1/(theta1 + 2 sqrt(theta0 theta2)).
  const double expected =
      1.0 / (land.theta[1] + 2.0 * std::sqrt(land.theta[0] * land.theta[2]));
  CHECK(eta(land, peak) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(2516.18).epsilon(1e-4));
  // Cross-check by dense grid maximization.
  double best = 0.0;
  for (int i = 0; i <= 200000; ++i) best = std::max(best, eta(land, 20.0 * i / 200000.0));
  CHECK(best <= expected * (1.0 + 1e-12));
  CHECK(best >= expected * (1.0 - 1e-8));
}

TEST_CASE("gradient closed forms") {
  const Eigen::Vector3d g1 = gradient({ModelKind::P1, {1.0, 0.0, 1.0}}, 1.0);
  CHECK(g1[0] == doctest::Approx(-0.25));
  CHECK(g1[1] == doctest::Approx(-0.25));
  CHECK(g1[2] == doctest::Approx(-0.25));

  const Eigen::Vector3d g2 = gradient({ModelKind::P2, {1.0, 1.0, 1.0}}, 1.0);
  CHECK(g2[0] == doctest::Approx(1.0 / 3.0));
  CHECK(g2[1] == doctest::Approx(-1.0 / 9.0));
  CHECK(g2[2] == doctest::Approx(-1.0 / 9.0));

  CHECK(gradient({ModelKind::P1, {1.0, 0.0, 1.0}}, 0.0).norm() == 0.0);
}

TEST_CASE("gradient matches finite differences over random models") {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 100; ++trial) {
    const ModelSpec model = test::random_model(rng);
    const double p = peak_location(model);
    for (double factor : {0.05, 0.2, 1.0, 3.0, 12.0}) {
      const double u = p * factor;
      const Eigen::Vector3d g = gradient(model, u);
      const Eigen::Vector3d fd = fd_gradient(model, u);
      REQUIRE((g - fd).norm() <= 1e-6 * std::max(g.norm(), 1e-300));
    }
  }
}

TEST_CASE("gradient u-derivative matches finite differences") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const ModelSpec model = test::random_model(rng);
    const double u = peak_location(model) * (0.3 + 2.0 * (trial % 5) / 5.0);
    const double h = 1e-6 * u;
    const Eigen::Vector3d fd =
        (gradient(model, u + h) - gradient(model, u - h)) / (2.0 * h);
    const Eigen::Vector3d an = gradient_du(model, u);
    REQUIRE((an - fd).norm() <= 1e-5 * std::max(an.norm(), 1e-300));
  }
}

TEST_CASE("positivity and unimodality of eta") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const ModelSpec model = test::random_model(rng);
    const double p = peak_location(model);
    double prev = 0.0;
    bool rising = true;
    for (int i = 1; i <= 4000; ++i) {
      const double u = 8.0 * p * i / 4000.0;
      const double v = eta(model, u);
      REQUIRE(v > 0.0);
      if (rising && v < prev) {
        // The maximum must be bracketed around the peak location.
        REQUIRE(std::abs(8.0 * p * (i - 1) / 4000.0 - p) <= 8.0 * p / 1000.0);
        rising = false;
      } else if (!rising) {
        REQUIRE(v <= prev * (1.0 + 1e-12));
      }
      prev = v;
    }
    REQUIRE_FALSE(rising);
  }
}

TEST_CASE("peak location and gamma") {
  CHECK(peak_location({ModelKind::P1, {1.0, 0.0, 1.0}}) == doctest::Approx(1.0));
  CHECK(peak_location({ModelKind::P2, {5.0, 4.0, 1.0}}) == doctest::Approx(2.0));
  const ModelSpec land = test::landete_model();
  CHECK(peak_location(land) ==
        doctest::Approx(std::sqrt(land.theta[0] / land.theta[2])).epsilon(1e-15));
  CHECK(peak_location(land) == doctest::Approx(3.08517).epsilon(1e-5));

  CHECK(gamma_factor({ModelKind::P1, {1.0, 0.0, 1.0}}).value == 0.0);
  CHECK(gamma_factor({ModelKind::P2, {1.0, 4.0, 1.0}}).value == doctest::Approx(0.5));
  CHECK(gamma_factor(land).value == doctest::Approx(2.27968).epsilon(1e-5));
}

TEST_CASE("scale equivariance of P1 models") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelSpec model = test::random_p1(rng);
    const double k = 0.25 + 3.0 * (trial / 20.0);
    const ModelSpec scaled{
        ModelKind::P1,
        {k * k * model.theta[0], k * model.theta[1], model.theta[2]}};
    CHECK(gamma_factor(scaled).value ==
          doctest::Approx(gamma_factor(model).value).epsilon(1e-12));
    CHECK(peak_location(scaled) ==
          doctest::Approx(k * peak_location(model)).epsilon(1e-12));
  }
}

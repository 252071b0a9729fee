#include "iqdesign/closed_form.hpp"

#include <cmath>

#include "iqdesign/chebyshev.hpp"
#include "iqdesign/errors.hpp"

namespace iqdesign {

namespace {
constexpr double kWeightCrossCheck = 1e-8;

std::array<double, 3> geometric_support(const ModelSpec& model, double rho) {
  const double p = peak_location(model);
  return {p / rho, p, rho * p};
}
}  // namespace

ScalingFactor scaling_factor_d1(GammaFactor gamma) {
  const double g = gamma.value;
  const double root2 = std::sqrt(2.0);
  ScalingFactor sf;
  sf.gamma = gamma;
  sf.rho = 1.0 + (2.0 + g) / root2 +
           std::sqrt(2.0 * (1.0 + root2) + (2.0 + root2) * g + 0.5 * g * g);
  return sf;
}

ScalingFactor scaling_factor_d(GammaFactor gamma) {
  const double g = gamma.value;
  ScalingFactor sf;
  sf.gamma = gamma;
  const double delta = 0.5 * (g + 1.0 + std::sqrt(g * g + 6.0 * g + 33.0));
  sf.delta = delta;
  sf.rho = 0.5 * (delta + std::sqrt(delta * delta - 4.0));
  return sf;
}

ScalingFactor scaling_factor(const ModelSpec& model, const Criterion& criterion) {
  const GammaFactor g = gamma_factor(model);
  return criterion.kind() == CriterionKind::D ? scaling_factor_d(g)
                                              : scaling_factor_d1(g);
}

std::string to_string(IntervalForm form) {
  switch (form) {
    case IntervalForm::Unconstrained: return "unconstrained";
    case IntervalForm::LowerPinned: return "lower-pinned";
    case IntervalForm::UpperPinned: return "upper-pinned";
    case IntervalForm::BothPinned: return "both-pinned";
  }
  return "?";
}

IntervalForm classify_interval(const ModelSpec& model, const Criterion& criterion,
                               const DesignSpace& space) {
  validate(model);
  validate(space);
  const double rho = scaling_factor(model, criterion).rho;
  const double p = peak_location(model);
  const bool lower = space.s >= p / rho;
  const bool upper = space.bounded() && space.t <= rho * p;
  if (lower && upper) return IntervalForm::BothPinned;
  if (lower) return IntervalForm::LowerPinned;
  if (upper) return IntervalForm::UpperPinned;
  return IntervalForm::Unconstrained;
}

std::array<double, 3> theorem_d1_weights_p1(const ModelSpec& model) {
  if (model.kind != ModelKind::P1)
    throw UnsupportedCriterion("theorem_d1_weights_p1 applies to P1 models");
  validate(model);
  const auto [t0, t1, t2] = model.theta;
  const double r = scaling_factor_d1(gamma_factor(model)).rho;
  const double s0 = std::sqrt(t0), s2 = std::sqrt(t2), s02 = std::sqrt(t0 * t2);
  const double r2 = r * r;
  const double lambda =
      t0 * (t0 * t2 * (1.0 + 6.0 * r2 + r2 * r2) +
            2.0 * t1 * r * (t1 * r + s02 * (1.0 + r) * (1.0 + r)));
  const double w0 = std::pow(s2 * t0 + t1 * s0 * r + s2 * t0 * r2, 2) /
                    ((1.0 + r) * lambda);
  const double w1 = std::pow(2.0 * s2 * t0 + t1 * s0, 2) * r2 / lambda;
  return {w0, w1, 1.0 - w0 - w1};
}

std::array<double, 3> extrapolation_weights_printed(const ModelSpec& model, double xe) {
  validate(model);
  const double r = scaling_factor_d1(gamma_factor(model)).rho;
  const double r2 = r * r, r4 = r2 * r2;
  if (model.kind == ModelKind::P1) {
    const auto [t0, t1, t2] = model.theta;
    const double s0 = std::sqrt(t0), s2 = std::sqrt(t2), s02 = std::sqrt(t0 * t2);
    const double lambda =
        t0 * (t0 * t0 * t2 * (1.0 + 6.0 * r2 + r4) +
              t0 * (2.0 * t1 * t1 * r2 +
                    2.0 * t1 * r * (s02 * (1.0 + r) * (1.0 + r) -
                                    4.0 * xe * t2 * (1.0 + r2)) +
                    t2 * xe * (-2.0 * s02 * (1.0 + r) * (1.0 + r) * (1.0 + r2) +
                               xe * t2 * (1.0 + 6.0 * r2 + r4))) +
              t1 * xe * r * (2.0 * s02 * t2 * xe * (1.0 + r) * (1.0 + r) -
                             t1 * (s02 + r * (-2.0 * xe * t2 + s02 * (2.0 + r)))));
    const double w0 = (s0 - xe * s2) * (-xe * s2 + s0 * r) *
                      std::pow(t0 * s2 + t1 * s0 * r + t0 * s2 * r2, 2) /
                      ((1.0 + r) * lambda);
    const double w1 = std::pow(2.0 * t0 * s2 + t1 * s0, 2) * r *
                      (-xe * s2 + s0 * r) * (s0 - xe * s2 * r) / lambda;
    return {w0, w1, 1.0 - w0 - w1};
  }
  const auto [t0, t1, t2] = model.theta;
  const double s1 = std::sqrt(t1), s2 = std::sqrt(t2), s12 = std::sqrt(t1 * t2);
  const double lambda =
      t1 * (t1 * t1 * t2 * (1.0 + 6.0 * r2 + r4) +
            xe * r * (-s12 + 2.0 * s12 * t2 * xe * (1.0 + r) * (1.0 + r) -
                      r * (-2.0 * xe * s2 + s12 * (2.0 + r))) +
            t1 * (2.0 * r2 +
                  2.0 * r * (s12 * (1.0 + r) * (1.0 + r) -
                             4.0 * xe * s2 * (1.0 + r2)) +
                  xe * (-2.0 * s12 * t2 * (1.0 + r) * (1.0 + r) * (1.0 + r2) +
                        xe * t2 * t2 * (1.0 + 6.0 * r2 + r4))));
  const double w0 = (s1 - xe * s2) * (-xe * s2 + s1 * r) *
                    std::pow(t1 * s2 + s1 * r + t1 * s2 * r2, 2) /
                    ((1.0 + r) * lambda);
  const double w1 = std::pow(2.0 * t1 * s2 + s1, 2) * r * (-xe * s2 + s1 * r) *
                    (s1 - xe * s2 * r) / lambda;
  return {w0, w1, 1.0 - w0 - w1};
}

Eigen::Vector3d chebyshev_coefficient_vector(const ModelSpec& model) {
  validate(model);
  const double r = scaling_factor_d1(gamma_factor(model)).rho;
  const double r2 = r * r, r4 = r2 * r2;
  const double den = (r - 1.0) * (r - 1.0) * r;
  if (model.kind == ModelKind::P1) {
    const auto [t0, t1, t2] = model.theta;
    const double s0 = std::sqrt(t0), s2 = std::sqrt(t2), s02 = std::sqrt(t0 * t2);
    const double a = 2.0 * t1 * t1 * r2 +
                     2.0 * s0 * t1 * s2 * r * (1.0 + r) * (1.0 + r) +
                     t0 * t2 * (1.0 + 6.0 * r2 + r4);
    const double c1 = (t1 * t1 * r * (1.0 + r) * (1.0 + r) +
                       8.0 * s0 * t1 * s2 * r * (1.0 + r2) +
                       2.0 * t0 * t2 * (1.0 + r) * (1.0 + r) * (1.0 + r2)) /
                      den;
    return {-s0 * a / (s2 * den), c1, -s2 * a / (s0 * den)};
  }
  const auto [t0, t1, t2] = model.theta;
  const double s1 = std::sqrt(t1), s2 = std::sqrt(t2), s12 = std::sqrt(t1 * t2);
  const double b = (2.0 * r + s12 * (1.0 + r) * (1.0 + r)) *
                   (r + s12 * (1.0 + r2));
  return {-1.0 - 2.0 * s12 - 2.0 * b / den,
          -s1 * (1.0 + 2.0 * s12) * b / (t0 * s2 * den),
          -s2 * (1.0 + 2.0 * s12) * b / (t0 * s1 * den)};
}

Design unbounded_design(const ModelSpec& model, const Criterion& criterion,
                        WarningLog* warnings) {
  validate(model);
  const ScalingFactor sf = scaling_factor(model, criterion);
  const auto support = geometric_support(model, sf.rho);

  auto make_design = [&](const std::array<double, 3>& w) {
    Design d;
    d.points.assign(support.begin(), support.end());
    d.weights.assign(w.begin(), w.end());
    return d;
  };
  auto cross_checked = [&](const std::array<double, 3>& printed,
                           const Eigen::Vector3d& c,
                           const std::string& label) -> std::array<double, 3> {
    const auto recomputed = optimal_weights_for_c(support, c, model);
    for (int i = 0; i < 3; ++i) {
      if (std::abs(printed[i] - recomputed[i]) > kWeightCrossCheck) {
        if (warnings)
          warnings->push_back(label +
                              ": printed weight formula disagrees with the "
                              "optimal-weight equation; using the latter");
        return recomputed;
      }
    }
    return printed;
  };

  switch (criterion.kind()) {
    case CriterionKind::D:
      return make_design({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    case CriterionKind::D1: {
      const Eigen::Vector3d e3(0.0, 0.0, 1.0);
      if (model.kind == ModelKind::P1)
        return make_design(cross_checked(theorem_d1_weights_p1(model), e3, "D1"));
      // The printed P2 weight expressions do not agree with the
      // optimal-weight equation; the equation is authoritative.
      return make_design(optimal_weights_for_c(support, e3, model));
    }
    case CriterionKind::E: {
      const Eigen::Vector3d c = chebyshev_coefficient_vector(model);
      return make_design(optimal_weights_for_c(support, c, model));
    }
    case CriterionKind::Extrapolation: {
      const double xe = criterion.xe();
      if (xe >= support[0] && xe <= support[2])
        throw ValidationError(
            "extrapolation point lies inside the geometric support range");
      const Eigen::Vector3d c = gradient(model, xe);
      return make_design(
          cross_checked(extrapolation_weights_printed(model, xe), c, "ce"));
    }
    case CriterionKind::C:
      throw UnsupportedCriterion(
          "unbounded_design supports D, E, D1 and Extrapolation only");
  }
  throw UnsupportedCriterion("unknown criterion");
}

}  // namespace iqdesign

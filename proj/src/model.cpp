#include "iqdesign/model.hpp"

#include <cmath>

#include "iqdesign/errors.hpp"

namespace iqdesign {

std::string to_string(ModelKind kind) {
  return kind == ModelKind::P1 ? "P1" : "P2";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "P1") return ModelKind::P1;
  if (name == "P2") return ModelKind::P2;
  throw ValidationError("unknown model kind '" + name + "' (expected P1 or P2)");
}

std::optional<std::string> validation_error(const ModelSpec& model) {
  const auto [t0, t1, t2] = model.theta;
  if (!std::isfinite(t0) || !std::isfinite(t1) || !std::isfinite(t2))
    return "theta must be finite";
  if (model.kind == ModelKind::P1) {
    if (t0 <= 0) return "P1 requires theta0 > 0";
    if (t2 <= 0) return "P1 requires theta2 > 0";
    if (t1 <= -2.0 * std::sqrt(t0 * t2))
      return "P1 requires theta1 > -2*sqrt(theta0*theta2) (denominator positivity)";
  } else {
    if (t0 <= 0) return "P2 requires theta0 > 0";
    if (t1 <= 0) return "P2 requires theta1 > 0";
    if (t2 <= 0) return "P2 requires theta2 > 0";
    if (2.0 * std::sqrt(t1 * t2) <= 1.0) return "P2 requires 2*sqrt(theta1*theta2) > 1";
  }
  return std::nullopt;
}

bool is_valid(const ModelSpec& model) { return !validation_error(model).has_value(); }

void validate(const ModelSpec& model) {
  if (auto err = validation_error(model)) throw ValidationError(*err);
}

double eta(const ModelSpec& model, double u) {
  const auto [t0, t1, t2] = model.theta;
  if (model.kind == ModelKind::P1) return u / (t0 + u * (t1 + t2 * u));
  return t0 * u / (t1 + u * (1.0 + t2 * u));
}

Eigen::Vector3d gradient(const ModelSpec& model, double u) {
  if (u == 0.0) return Eigen::Vector3d::Zero();
  const auto [t0, t1, t2] = model.theta;
  if (model.kind == ModelKind::P1) {
    const double d = t0 + u * (t1 + t2 * u);
    const double s = -u / (d * d);
    return {s, s * u, s * u * u};
  }
  const double d = t1 + u * (1.0 + t2 * u);
  const double s = u / d;
  return {s, -s * t0 / d, -s * t0 * u * u / d};
}

Eigen::Vector3d gradient_du(const ModelSpec& model, double u) {
  const auto [t0, t1, t2] = model.theta;
  if (model.kind == ModelKind::P1) {
    if (u == 0.0) return {-1.0 / (t0 * t0), 0.0, 0.0};
    const double d = t0 + u * (t1 + t2 * u);
    const double dp = t1 + 2.0 * t2 * u;
    const double d3 = d * d * d;
    return {-(d - 2.0 * u * dp) / d3,
            -2.0 * u * (d - u * dp) / d3,
            -u * u * (3.0 * d - 2.0 * u * dp) / d3};
  }
  if (u == 0.0) return {1.0 / t1, -t0 / (t1 * t1), 0.0};
  const double d = t1 + u * (1.0 + t2 * u);
  const double dp = 1.0 + 2.0 * t2 * u;
  const double d3 = d * d * d;
  return {(d - u * dp) / (d * d),
          -t0 * (d - 2.0 * u * dp) / d3,
          -t0 * u * u * (3.0 * d - 2.0 * u * dp) / d3};
}

double peak_location(const ModelSpec& model) {
  const auto [t0, t1, t2] = model.theta;
  return model.kind == ModelKind::P1 ? std::sqrt(t0 / t2) : std::sqrt(t1 / t2);
}

GammaFactor gamma_factor(const ModelSpec& model) {
  const auto [t0, t1, t2] = model.theta;
  if (model.kind == ModelKind::P1) return {t1 / std::sqrt(t0 * t2)};
  return {1.0 / std::sqrt(t1 * t2)};
}

}  // namespace iqdesign

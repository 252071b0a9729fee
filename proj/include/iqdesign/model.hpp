#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>

namespace iqdesign {

// Two parameterizations of the inverse quadratic regression curve:
//   P1: eta(u) = u / (theta0 + theta1*u + theta2*u^2)
//   P2: eta(u) = theta0*u / (theta1 + u + theta2*u^2)
enum class ModelKind { P1, P2 };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct ModelSpec {
  ModelKind kind = ModelKind::P1;
  std::array<double, 3> theta{1.0, 0.0, 1.0};
};

// Dimensionless shape ratio controlling the geometric scaling factors.
// P1: theta1/sqrt(theta0*theta2); P2: 1/sqrt(theta1*theta2).
struct GammaFactor {
  double value = 0.0;
};

// Returns the violated constraint, or nullopt when the model is valid.
//
// P1 requires theta0 > 0, theta2 > 0 and theta1 > -2*sqrt(theta0*theta2),
// which is exactly positivity of the denominator on (0, inf). P2 requires
// theta0, theta1, theta2 > 0 and 2*sqrt(theta1*theta2) > 1.
std::optional<std::string> validation_error(const ModelSpec& model);

bool is_valid(const ModelSpec& model);

// Throws ValidationError naming the violated constraint.
void validate(const ModelSpec& model);

// Expected response. Total on [0, inf) for valid models; eta(0) = 0.
double eta(const ModelSpec& model, double u);

// Gradient of eta with respect to theta. Zero vector at u = 0.
Eigen::Vector3d gradient(const ModelSpec& model, double u);

// d/du of the gradient; used by the equioscillation solver.
Eigen::Vector3d gradient_du(const ModelSpec& model, double u);

// Location of the response maximum: sqrt(theta0/theta2) for P1,
// sqrt(theta1/theta2) for P2.
double peak_location(const ModelSpec& model);

GammaFactor gamma_factor(const ModelSpec& model);

}  // namespace iqdesign

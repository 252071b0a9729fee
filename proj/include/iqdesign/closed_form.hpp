#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "iqdesign/design.hpp"
#include "iqdesign/model.hpp"

namespace iqdesign {

using WarningLog = std::vector<std::string>;

// Geometric scaling factor rho > 1. delta is the D-criterion intermediate
// (rho + 1/rho = delta) and is absent for the Chebyshev-family factor.
struct ScalingFactor {
  double rho = 1.0;
  std::optional<double> delta;
  GammaFactor gamma;
};

// rho(gamma) = 1 + (2+gamma)/sqrt(2)
//            + sqrt(2(1+sqrt(2)) + (2+sqrt(2))gamma + gamma^2/2).
// Shared by the D1-, E- and extrapolation-optimal designs.
ScalingFactor scaling_factor_d1(GammaFactor gamma);

// delta = (gamma + 1 + sqrt(gamma^2 + 6 gamma + 33))/2,
// rho = (delta + sqrt(delta^2 - 4))/2.
ScalingFactor scaling_factor_d(GammaFactor gamma);

// The scaling factor matching a criterion: D uses scaling_factor_d, all
// c-based criteria and E use scaling_factor_d1.
ScalingFactor scaling_factor(const ModelSpec& model, const Criterion& criterion);

// Which bounded-interval case applies. Boundary ties classify as pinned.
enum class IntervalForm { Unconstrained, LowerPinned, UpperPinned, BothPinned };

std::string to_string(IntervalForm form);

IntervalForm classify_interval(const ModelSpec& model, const Criterion& criterion,
                               const DesignSpace& space);

// Explicit optimal design with support {p/rho, p, rho*p}. Supported
// criteria: D (equal weights), D1, E, Extrapolation. Throws
// UnsupportedCriterion for general c-vectors. Printed weight formulas are
// cross-checked against the optimal-weight equation; on disagreement beyond
// 1e-8 the optimal-weight result wins and a warning is appended.
Design unbounded_design(const ModelSpec& model, const Criterion& criterion,
                        WarningLog* warnings = nullptr);

// The printed D1 weight expressions for the first parameterization.
std::array<double, 3> theorem_d1_weights_p1(const ModelSpec& model);

// The printed extrapolation weight expressions (both parameterizations, as
// published; the second parameterization's formulas are known to disagree
// with the optimal-weight equation).
std::array<double, 3> extrapolation_weights_printed(const ModelSpec& model, double xe);

// Coefficient vector of the equioscillating combination on [0, inf) in
// closed form; the E-optimal design is c-optimal for this vector.
Eigen::Vector3d chebyshev_coefficient_vector(const ModelSpec& model);

}  // namespace iqdesign

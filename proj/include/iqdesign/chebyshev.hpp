#pragma once

#include <Eigen/Dense>
#include <array>

#include "iqdesign/design.hpp"
#include "iqdesign/model.hpp"

namespace iqdesign {

// Equioscillating linear combination phi(u) = coefficients . f(u) with
// |phi| <= level on the design space and phi(points[i]) = (-1)^(2-i) * level.
// Coefficients are normalized so that level = 1 and phi(points[2]) = +1.
struct ChebyshevSolution {
  std::array<double, 3> points{};
  Eigen::Vector3d coefficients = Eigen::Vector3d::Zero();
  double level = 1.0;

  double phi(const ModelSpec& model, double u) const {
    return coefficients.dot(gradient(model, u));
  }
};

// det [f(u0) f(u1) f(u2)]; nonzero for distinct points in (0, inf).
double system_determinant(const ModelSpec& model, const std::array<double, 3>& points);

// Sampled necessary check of the bordered-determinant condition defining the
// set A*: det[f(x1), f(x2), c] must stay away from zero for all distinct
// pairs x1, x2 in the space. Detects zeros through sign changes along the
// sampled sweeps plus golden-section refinement of the smallest sampled
// magnitude; not a proof of membership.
bool in_a_star(const Eigen::Vector3d& c, const ModelSpec& model,
               const DesignSpace& space);

// Solves the equioscillation system by damped Newton iteration seeded from
// the geometric points {p/rho, p, rho*p} clipped to the space. Points pinned
// to a boundary lose their stationarity condition. Throws NoConvergence.
ChebyshevSolution chebyshev_points(const ModelSpec& model, const DesignSpace& space);

// Kiefer-Wolfowitz optimal weights for a c-optimal design supported at
// `points`: X = (f_j(s_i)), v = (X X^T)^{-1} X c, w_i = |v_i| / sum |v_j|.
std::array<double, 3> optimal_weights_for_c(const std::array<double, 3>& points,
                                            const Eigen::Vector3d& c,
                                            const ModelSpec& model);

}  // namespace iqdesign

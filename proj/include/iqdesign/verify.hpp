#pragma once

#include <Eigen/Dense>
#include <string>

#include "iqdesign/design.hpp"
#include "iqdesign/model.hpp"

#include "json.hpp"

namespace iqdesign {

// Result of an equivalence-theorem check. The design is certified optimal
// when the directional function stays below `bound` on the whole space:
// violation = max(0, max_directional - bound)/bound.
struct OptimalityReport {
  std::string criterion;
  double bound = 0.0;
  double max_directional = 0.0;
  double argmax_u = 0.0;
  double violation = 0.0;
  bool passed = false;
  int grid_size = 0;
};

nlohmann::json to_json(const OptimalityReport& report);

// c-optimality: (f(u)^T G c)^2 <= c^T M^- c with G the eigenvalue
// pseudo-inverse. When M is rank-deficient and the pseudo-inverse witness
// fails, the null-space family of generalized inverses is searched for a
// better witness before reporting a violation.
OptimalityReport check_c_optimality(const Design& design, const Eigen::Vector3d& c,
                                    const ModelSpec& model, const DesignSpace& space,
                                    double tolerance = 1e-6, int grid_size = 10000);

// Kiefer equivalence condition f(u)^T M^{-1} f(u) <= 3.
OptimalityReport check_d_optimality(const Design& design, const ModelSpec& model,
                                    const DesignSpace& space, double tolerance = 1e-6,
                                    int grid_size = 10000);

// E-optimality with a simple minimum eigenvalue: (f(u)^T z)^2 <= lambda_min
// for the unit eigenvector z. Throws MultipleMinEigenvalue when the minimum
// eigenvalue is not simple.
OptimalityReport check_e_optimality(const Design& design, const ModelSpec& model,
                                    const DesignSpace& space, double tolerance = 1e-6,
                                    int grid_size = 10000);

// Dispatches to the matching check; D1 and Extrapolation reduce to the
// c-optimality check with c = (0,0,1) and c = f(xe).
OptimalityReport check_optimality(const Design& design, const Criterion& criterion,
                                  const ModelSpec& model, const DesignSpace& space,
                                  double tolerance = 1e-6, int grid_size = 10000);

}  // namespace iqdesign

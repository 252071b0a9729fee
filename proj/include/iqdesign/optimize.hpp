#pragma once

#include "iqdesign/closed_form.hpp"
#include "iqdesign/design.hpp"
#include "iqdesign/model.hpp"
#include "iqdesign/verify.hpp"

namespace iqdesign {

struct SolverConfig {
  int grid_size = 2001;
  double point_tolerance = 1e-9;
  double weight_tolerance = 1e-11;
  int max_iterations = 10000;
  double equivalence_tolerance = 1e-7;
};

struct SolveResult {
  Design design;
  OptimalityReport report;
  WarningLog warnings;
};

// Optimal design for the criterion on the space. Unconstrained intervals
// dispatch to the closed forms; pinned forms fix the boundary points and
// optimize the free support points by Nelder-Mead simplex descent followed
// by coordinate-wise golden-section refinement, with weights recomputed
// inside the objective (equal for D, optimal-weight equation otherwise).
// Every returned design carries a passing equivalence report; the solver
// retries from perturbed seeds before giving up with NoConvergence.
SolveResult optimal_design(const ModelSpec& model, const Criterion& criterion,
                           const DesignSpace& space, const SolverConfig& config = {});

// Brute-force reference: evaluates every 3-subset of a uniform grid with
// criterion-appropriate weights and returns the best design found. Ties
// resolve to the lexicographically smallest support. O(grid_size^3).
Design grid_oracle(const ModelSpec& model, const Criterion& criterion,
                   const DesignSpace& space, int grid_size);

}  // namespace iqdesign

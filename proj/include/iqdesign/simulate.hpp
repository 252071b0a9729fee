#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "iqdesign/design.hpp"
#include "iqdesign/model.hpp"

#include "json.hpp"

namespace iqdesign {

struct SimConfig {
  double sigma = 1.0;
  int n_runs = 100;
  int replicates = 100;
  std::uint64_t seed = 0;
  int max_fit_iterations = 100;
};

struct SimReport {
  Eigen::Matrix3d empirical_covariance = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d predicted_covariance = Eigen::Matrix3d::Zero();
  Eigen::Vector3d relative_diagonal_error = Eigen::Vector3d::Zero();
  int failed_fits = 0;
  int replicates = 0;
};

nlohmann::json to_json(const SimReport& report);

struct Observation {
  double u = 0.0;
  double y = 0.0;
};

struct FitResult {
  Eigen::Vector3d theta = Eigen::Vector3d::Zero();
  bool converged = false;
  int iterations = 0;
};

// Damped Gauss-Newton least squares for theta. Converged when the gradient
// norm drops below 1e-10 or the accepted step below 1e-12. Requires at least
// 3 distinct u values with nonzero gradients (InsufficientDesign otherwise).
FitResult fit_mle(const std::vector<Observation>& observations, ModelKind kind,
                  const Eigen::Vector3d& seed_theta, int max_iterations = 100);

// Monte Carlo check of the asymptotic covariance approximation
// (sigma^2/N) M^{-1}: apportions the design to n_runs observations, draws
// Gaussian noise per replicate (counter-keyed RNG: identical seeds give
// identical reports), fits by Gauss-Newton seeded at the true theta, and
// compares the sample covariance of the estimates with the prediction.
// Throws SingularMatrix and TooManyFailedFits (>5% of replicates).
// When csv_path is nonempty the per-replicate estimates are dumped there.
SimReport run_simulation(const Design& design, const ModelSpec& model,
                         const SimConfig& config, const std::string& csv_path = "");

}  // namespace iqdesign

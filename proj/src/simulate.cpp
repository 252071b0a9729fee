#include "iqdesign/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "iqdesign/detail/search.hpp"
#include "iqdesign/errors.hpp"

namespace iqdesign {

namespace {

int count_informative_points(const std::vector<Observation>& obs) {
  std::set<double> distinct;
  for (const auto& o : obs)
    if (o.u > 0.0) distinct.insert(o.u);
  return static_cast<int>(distinct.size());
}

double sum_squared_residuals(const std::vector<Observation>& obs,
                             const ModelSpec& model) {
  double sse = 0.0;
  for (const auto& o : obs) {
    const double r = o.y - eta(model, o.u);
    sse += r * r;
  }
  return sse;
}

}  // namespace

FitResult fit_mle(const std::vector<Observation>& observations, ModelKind kind,
                  const Eigen::Vector3d& seed_theta, int max_iterations) {
  if (count_informative_points(observations) < 3)
    throw InsufficientDesign(
        "fit_mle requires at least 3 distinct points with nonzero gradients");
  FitResult result;
  ModelSpec model{kind, {seed_theta[0], seed_theta[1], seed_theta[2]}};
  double sse = sum_squared_residuals(observations, model);

  for (int iter = 0; iter < max_iterations; ++iter) {
    result.iterations = iter;
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (const auto& o : observations) {
      const Eigen::Vector3d f = gradient(model, o.u);
      jtj.noalias() += f * f.transpose();
      jtr.noalias() += f * (o.y - eta(model, o.u));
    }
    if (jtr.norm() <= 1e-10) {
      result.converged = true;
      break;
    }
    const Eigen::LDLT<Eigen::Matrix3d> ldlt(jtj);
    if (ldlt.info() != Eigen::Success) break;
    const Eigen::Vector3d step = ldlt.solve(jtr);
    if (!step.allFinite()) break;

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h < 60; ++h) {
      ModelSpec trial = model;
      for (int i = 0; i < 3; ++i) trial.theta[i] += lambda * step[i];
      const double trial_sse = sum_squared_residuals(observations, trial);
      if (std::isfinite(trial_sse) && trial_sse < sse) {
        model = trial;
        sse = trial_sse;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      // Descent exhausted; the smallest attempted step decides convergence.
      result.converged = (lambda * step).norm() <= 1e-12;
      break;
    }
    if ((lambda * step).norm() <= 1e-12) {
      result.converged = true;
      break;
    }
  }
  result.theta = {model.theta[0], model.theta[1], model.theta[2]};
  return result;
}

nlohmann::json to_json(const SimReport& report) {
  auto matrix = [](const Eigen::Matrix3d& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 3; ++i)
      rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
    return rows;
  };
  return nlohmann::json{
      {"empirical_covariance", matrix(report.empirical_covariance)},
      {"predicted_covariance", matrix(report.predicted_covariance)},
      {"relative_diagonal_error",
       {report.relative_diagonal_error[0], report.relative_diagonal_error[1],
        report.relative_diagonal_error[2]}},
      {"failed_fits", report.failed_fits},
      {"replicates", report.replicates}};
}

SimReport run_simulation(const Design& design, const ModelSpec& model,
                         const SimConfig& config, const std::string& csv_path) {
  validate(model);
  validate(design);
  if (config.sigma < 0.0) throw ValidationError("sigma must be nonnegative");
  if (config.replicates < 1) throw ValidationError("replicates must be >= 1");
  const std::vector<int> counts = apportion(design, config.n_runs);

  const InformationMatrix info = information_matrix(design, model);
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(info.m);
  if (!lu.isInvertible())
    throw SingularMatrix("run_simulation: singular information matrix");

  SimReport report;
  report.replicates = config.replicates;
  report.predicted_covariance =
      (config.sigma * config.sigma / config.n_runs) * lu.inverse();

  const Eigen::Vector3d truth(model.theta[0], model.theta[1], model.theta[2]);
  std::vector<Eigen::Vector3d> estimates;
  estimates.reserve(config.replicates);

  std::ofstream csv;
  if (!csv_path.empty()) {
    csv.open(csv_path);
    if (!csv) throw ValidationError("cannot write csv file: " + csv_path);
    csv << "replicate,converged,theta0,theta1,theta2\n";
  }

  std::vector<Observation> obs;
  obs.reserve(config.n_runs);
  for (int rep = 0; rep < config.replicates; ++rep) {
    // Counter-keyed engine: replicate streams are independent of any
    // execution order.
    std::mt19937_64 engine(detail::mix64(config.seed ^
                                         (0x9E3779B97F4A7C15ull * (rep + 1))));
    std::normal_distribution<double> normal(0.0, 1.0);
    obs.clear();
    for (std::size_t i = 0; i < design.points.size(); ++i) {
      const double mean = eta(model, design.points[i]);
      for (int k = 0; k < counts[i]; ++k) {
        const double noise = config.sigma > 0.0 ? config.sigma * normal(engine) : 0.0;
        obs.push_back({design.points[i], mean + noise});
      }
    }
    const FitResult fit = fit_mle(obs, model.kind, truth, config.max_fit_iterations);
    if (csv.is_open())
      csv << rep << ',' << (fit.converged ? 1 : 0) << ',' << fit.theta[0] << ','
          << fit.theta[1] << ',' << fit.theta[2] << '\n';
    if (fit.converged)
      estimates.push_back(fit.theta);
    else
      ++report.failed_fits;
  }
  if (report.failed_fits > 0.05 * config.replicates)
    throw TooManyFailedFits(std::to_string(report.failed_fits) + " of " +
                            std::to_string(config.replicates) + " fits failed");

  const std::size_t m = estimates.size();
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& t : estimates) mean += t;
  if (m > 0) mean /= static_cast<double>(m);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& t : estimates) {
    const Eigen::Vector3d d = t - mean;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(m > 1 ? m - 1 : 1);
  report.empirical_covariance = cov;
  for (int i = 0; i < 3; ++i) {
    const double pred = report.predicted_covariance(i, i);
    report.relative_diagonal_error[i] =
        pred > 0.0 ? std::abs(cov(i, i) - pred) / pred : std::abs(cov(i, i));
  }
  return report;
}

}  // namespace iqdesign

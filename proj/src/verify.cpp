#include "iqdesign/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "iqdesign/closed_form.hpp"
#include "iqdesign/detail/search.hpp"
#include "iqdesign/errors.hpp"

namespace iqdesign {

namespace {

std::vector<double> verification_grid(const ModelSpec& model, const DesignSpace& space,
                                      double rho, int n, double stretch = 1.0) {
  std::vector<double> grid;
  grid.reserve(n + 2);
  if (space.bounded()) {
    for (int i = 0; i < n; ++i)
      grid.push_back(space.s + (space.t - space.s) * i / (n - 1.0));
    return grid;
  }
  const double p = peak_location(model);
  const double hi = 10.0 * rho * p * stretch;
  const double lo = std::max(space.s, 1e-4 * p);
  grid.push_back(space.s);
  for (int i = 0; i < n; ++i)
    grid.push_back(lo * std::pow(hi / lo, i / (n - 1.0)));
  return grid;
}

struct GridMax {
  double argmax = 0.0;
  double value = 0.0;
};

// Grid scan plus golden-section refinement around the argmax. For unbounded
// spaces the grid is re-extended while the function is still rising at the
// right end (the directional functions vanish at infinity, so this stops).
GridMax scan_max(const std::function<double(double)>& d, const ModelSpec& model,
                 const DesignSpace& space, double rho, int n) {
  double stretch = 1.0;
  for (int attempt = 0;; ++attempt) {
    const auto grid = verification_grid(model, space, rho, n, stretch);
    std::size_t k = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = d(grid[i]);
      if (v > best) { best = v; k = i; }
    }
    const bool tail_rising = !space.bounded() && k + 1 >= grid.size();
    if (tail_rising && attempt < 3) { stretch *= 10.0; continue; }
    const double lo = grid[k > 0 ? k - 1 : 0];
    const double hi = grid[std::min(k + 1, grid.size() - 1)];
    GridMax out{grid[k], best};
    if (hi > lo) {
      auto [x, v] = detail::golden_max(d, lo, hi);
      if (v > out.value) { out.argmax = x; out.value = v; }
    }
    return out;
  }
}

OptimalityReport make_report(const std::string& criterion, double bound,
                             const GridMax& peak, double tolerance, int grid_size) {
  OptimalityReport report;
  report.criterion = criterion;
  report.bound = bound;
  report.max_directional = peak.value;
  report.argmax_u = peak.argmax;
  report.violation = std::max(0.0, (peak.value - bound) / bound);
  report.passed = report.violation <= tolerance;
  report.grid_size = grid_size;
  return report;
}

}  // namespace

nlohmann::json to_json(const OptimalityReport& report) {
  return nlohmann::json{{"criterion", report.criterion},
                        {"bound", report.bound},
                        {"max_directional", report.max_directional},
                        {"argmax_u", report.argmax_u},
                        {"violation", report.violation},
                        {"passed", report.passed},
                        {"grid_size", report.grid_size}};
}

OptimalityReport check_c_optimality(const Design& design, const Eigen::Vector3d& c,
                                    const ModelSpec& model, const DesignSpace& space,
                                    double tolerance, int grid_size) {
  validate(model);
  validate(design, space);
  const InformationMatrix m = information_matrix(design, model);
  if (!estimable(c, m))
    throw NotEstimable("check_c_optimality: c is not estimable under the design");
  const double rho = scaling_factor_d1(gamma_factor(model)).rho;
  const Eigen::Matrix3d pinv = pseudo_inverse(m);
  const double bound = c.dot(pinv * c);

  auto directional = [&](const Eigen::Vector3d& witness) {
    return [&model, witness](double u) {
      const double t = gradient(model, u).dot(witness);
      return t * t;
    };
  };

  Eigen::Vector3d witness = pinv * c;
  GridMax peak = scan_max(directional(witness), model, space, rho, grid_size);

  // A rank-deficient information matrix admits a family of generalized
  // inverses G with Gc = pinv(M)c + null(M)y; the equivalence theorem only
  // requires one of them to satisfy the inequality.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.m);
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<int> null_dims;
  for (int i = 0; i < 3; ++i)
    if (es.eigenvalues()[i] <= 1e-10 * lmax) null_dims.push_back(i);
  if (!null_dims.empty() && (peak.value - bound) / bound > tolerance) {
    const int k = static_cast<int>(null_dims.size());
    Eigen::Matrix3Xd null_basis(3, k);
    for (int j = 0; j < k; ++j) null_basis.col(j) = es.eigenvectors().col(null_dims[j]);
    const auto coarse = verification_grid(model, space, rho, 2000);
    const Eigen::Vector3d g0 = witness;
    auto coarse_max = [&](const std::vector<double>& y) {
      Eigen::Vector3d g = g0;
      for (int j = 0; j < k; ++j) g += y[j] * null_basis.col(j);
      double worst = 0.0;
      for (double u : coarse)
        worst = std::max(worst, std::abs(gradient(model, u).dot(g)));
      return worst;
    };
    const double step = std::max(g0.norm(), 1e-300);
    auto [y_best, unused] = detail::nelder_mead(
        coarse_max, std::vector<double>(k, 0.0), std::vector<double>(k, step), 600);
    (void)unused;
    Eigen::Vector3d refined = g0;
    for (int j = 0; j < k; ++j) refined += y_best[j] * null_basis.col(j);
    const GridMax peak2 = scan_max(directional(refined), model, space, rho, grid_size);
    if (peak2.value < peak.value) { peak = peak2; witness = refined; }
  }
  return make_report("c", bound, peak, tolerance, grid_size);
}

OptimalityReport check_d_optimality(const Design& design, const ModelSpec& model,
                                    const DesignSpace& space, double tolerance,
                                    int grid_size) {
  validate(model);
  validate(design, space);
  const InformationMatrix m = information_matrix(design, model);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.m);
  if (!(es.eigenvalues()[0] > 1e-12 * std::abs(es.eigenvalues()[2])))
    throw SingularMatrix("check_d_optimality: singular information matrix");
  const Eigen::Matrix3d minv = m.m.inverse();
  const double rho = scaling_factor_d(gamma_factor(model)).rho;
  auto d = [&](double u) {
    const Eigen::Vector3d f = gradient(model, u);
    return f.dot(minv * f);
  };
  const GridMax peak = scan_max(d, model, space, rho, grid_size);
  return make_report("D", 3.0, peak, tolerance, grid_size);
}

OptimalityReport check_e_optimality(const Design& design, const ModelSpec& model,
                                    const DesignSpace& space, double tolerance,
                                    int grid_size) {
  validate(model);
  validate(design, space);
  const InformationMatrix m = information_matrix(design, model);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.m);
  const Eigen::Vector3d evals = es.eigenvalues();
  if (!(evals[0] > 0.0))
    throw SingularMatrix("check_e_optimality: singular information matrix");
  if (evals[1] - evals[0] <= 1e-8 * evals[2])
    throw MultipleMinEigenvalue(
        "check_e_optimality: minimum eigenvalue is not simple");
  const Eigen::Vector3d z = es.eigenvectors().col(0);
  const double rho = scaling_factor_d1(gamma_factor(model)).rho;
  auto d = [&](double u) {
    const double t = gradient(model, u).dot(z);
    return t * t;
  };
  const GridMax peak = scan_max(d, model, space, rho, grid_size);
  return make_report("E", evals[0], peak, tolerance, grid_size);
}

OptimalityReport check_optimality(const Design& design, const Criterion& criterion,
                                  const ModelSpec& model, const DesignSpace& space,
                                  double tolerance, int grid_size) {
  switch (criterion.kind()) {
    case CriterionKind::D:
      return check_d_optimality(design, model, space, tolerance, grid_size);
    case CriterionKind::E:
      return check_e_optimality(design, model, space, tolerance, grid_size);
    case CriterionKind::D1:
    case CriterionKind::C:
    case CriterionKind::Extrapolation: {
      OptimalityReport report = check_c_optimality(
          design, criterion.target_vector(model), model, space, tolerance, grid_size);
      report.criterion = criterion.name();
      return report;
    }
  }
  throw UnsupportedCriterion("unknown criterion");
}

}  // namespace iqdesign

#include "iqdesign/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "iqdesign/closed_form.hpp"
#include "iqdesign/detail/search.hpp"
#include "iqdesign/errors.hpp"

namespace iqdesign {

namespace {

constexpr double kGlobalBoundSlack = 1e-8;
constexpr double kSolutionAgreement = 1e-6;

struct ActiveSet {
  bool pin_lower = false;
  bool pin_upper = false;
};

// Verification range for the global |phi| <= 1 bound.
std::vector<double> bound_check_grid(const ModelSpec& model, const DesignSpace& space,
                                     double upper_hint, int n = 10000) {
  std::vector<double> grid;
  grid.reserve(n + 2);
  if (space.bounded()) {
    for (int i = 0; i <= n; ++i)
      grid.push_back(space.s + (space.t - space.s) * i / n);
  } else {
    const double lo = std::max(space.s, peak_location(model) * 1e-4);
    const double hi = upper_hint;
    grid.push_back(space.s);
    for (int i = 0; i <= n; ++i)
      grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / n));
  }
  return grid;
}

struct EquioscillationProblem {
  const ModelSpec& model;
  DesignSpace space;
  ActiveSet active;
  double scale;  // |f(peak)|, conditions the coefficient block

  Eigen::Vector3d g(double u) const { return gradient(model, u) / scale; }
  Eigen::Vector3d gdu(double u) const { return gradient_du(model, u) / scale; }

  std::vector<int> free_indices() const {
    std::vector<int> idx;
    if (!active.pin_lower) idx.push_back(0);
    idx.push_back(1);
    if (!active.pin_upper) idx.push_back(2);
    return idx;
  }

  // Unknowns: beta (3 scaled coefficients) then the free points.
  Eigen::VectorXd residual(const Eigen::Vector3d& beta,
                           const std::array<double, 3>& pts) const {
    const auto free = free_indices();
    Eigen::VectorXd r(3 + free.size());
    const double signs[3] = {1.0, -1.0, 1.0};
    for (int i = 0; i < 3; ++i) r[i] = beta.dot(g(pts[i])) - signs[i];
    for (std::size_t k = 0; k < free.size(); ++k) {
      const double u = pts[free[k]];
      r[3 + k] = u * beta.dot(gdu(u));
    }
    return r;
  }

  Eigen::MatrixXd jacobian(const Eigen::Vector3d& beta,
                           const std::array<double, 3>& pts) const {
    const auto free = free_indices();
    const int m = 3 + static_cast<int>(free.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < 3; ++i) J.block<1, 3>(i, 0) = g(pts[i]).transpose();
    for (std::size_t k = 0; k < free.size(); ++k) {
      const int i = free[k];
      J(i, 3 + static_cast<int>(k)) = beta.dot(gdu(pts[i]));
    }
    for (std::size_t k = 0; k < free.size(); ++k) {
      const double u = pts[free[k]];
      J.block(3 + k, 0, 1, 3) = (u * gdu(u)).transpose();
      const double h = 1e-6 * u;
      const double d2 =
          (beta.dot(gdu(u + h)) - beta.dot(gdu(u - h))) / (2.0 * h);
      J(3 + k, 3 + k) = beta.dot(gdu(u)) + u * d2;
    }
    return J;
  }

  bool ordered(const std::array<double, 3>& pts) const {
    const double margin = 1e-8 * pts[1];
    if (!(pts[0] < pts[1] - margin) || !(pts[1] < pts[2] - margin)) return false;
    if (pts[0] < space.s - 1e-15 * std::max(space.s, 1.0)) return false;
    if (space.bounded() && pts[2] > space.t * (1.0 + 1e-15)) return false;
    if (pts[0] <= 0.0) return false;
    return true;
  }
};

struct NewtonOutcome {
  bool converged = false;
  Eigen::Vector3d beta = Eigen::Vector3d::Zero();
  std::array<double, 3> points{};
};

NewtonOutcome newton_solve(const EquioscillationProblem& prob,
                           std::array<double, 3> pts, int max_iter = 200) {
  NewtonOutcome out;
  const auto free = prob.free_indices();
  // Linear seed for beta from the value conditions at the seed points.
  Eigen::Matrix3d G;
  for (int i = 0; i < 3; ++i) G.row(i) = prob.g(pts[i]).transpose();
  Eigen::Vector3d signs(1.0, -1.0, 1.0);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(G);
  if (!lu.isInvertible()) return out;
  Eigen::Vector3d beta = lu.solve(signs);

  double rnorm = prob.residual(beta, pts).norm();
  for (int iter = 0; iter < max_iter; ++iter) {
    if (rnorm <= 1e-12) break;
    const Eigen::VectorXd r = prob.residual(beta, pts);
    const Eigen::MatrixXd J = prob.jacobian(beta, pts);
    Eigen::FullPivLU<Eigen::MatrixXd> jlu(J);
    if (!jlu.isInvertible()) return out;
    const Eigen::VectorXd step = jlu.solve(-r);
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h < 40; ++h) {
      Eigen::Vector3d beta_try = beta + lambda * step.head<3>();
      std::array<double, 3> pts_try = pts;
      for (std::size_t k = 0; k < free.size(); ++k)
        pts_try[free[k]] += lambda * step[3 + k];
      if (prob.ordered(pts_try)) {
        const double rn = prob.residual(beta_try, pts_try).norm();
        if (rn < rnorm || rn <= 1e-12) {
          beta = beta_try;
          pts = pts_try;
          rnorm = rn;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) return out;
  }
  if (rnorm > 1e-10) return out;
  out.converged = true;
  out.beta = beta;
  out.points = pts;
  return out;
}

}  // namespace

double system_determinant(const ModelSpec& model, const std::array<double, 3>& points) {
  if (points[0] == points[1] || points[1] == points[2] || points[0] == points[2])
    throw ValidationError("system_determinant requires distinct points");
  for (double u : points)
    if (!(u > 0.0)) throw ValidationError("system_determinant requires points > 0");
  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i) M.col(i) = gradient(model, points[i]);
  return M.determinant();
}

bool in_a_star(const Eigen::Vector3d& c, const ModelSpec& model,
               const DesignSpace& space) {
  if (c.norm() == 0.0) throw ValidationError("in_a_star requires c != 0");
  validate(space);
  const double p = peak_location(model);
  const double rho = scaling_factor_d1(gamma_factor(model)).rho;
  double lo = space.s, hi = space.bounded() ? space.t : 10.0 * rho * p;
  lo = std::max(lo, 1e-4 * p);

  const int n_outer = 48, n_inner = 400;
  auto at = [&](int i, int n) {
    return space.bounded() ? lo + (hi - lo) * i / n
                           : lo * std::pow(hi / lo, static_cast<double>(i) / n);
  };
  const Eigen::Vector3d cn = c.normalized();
  auto rel_det = [&](double x1, double x2, double* raw = nullptr) {
    const Eigen::Vector3d f1 = gradient(model, x1);
    const Eigen::Vector3d f2 = gradient(model, x2);
    Eigen::Matrix3d D;
    D.col(0) = f1;
    D.col(1) = f2;
    D.col(2) = cn;
    const double det = D.determinant();
    if (raw) *raw = det;
    const double norms = f1.norm() * f2.norm();
    return norms > 0.0 ? std::abs(det) / norms : 0.0;
  };

  double min_rel = std::numeric_limits<double>::infinity();
  double min_x1 = lo, min_x2 = hi;
  for (int j = 0; j <= n_outer; ++j) {
    const double x2 = at(j, n_outer);
    double prev_raw = 0.0, prev_x1 = 0.0;
    bool have_prev = false;
    for (int i = 0; i <= n_inner; ++i) {
      const double x1 = at(i, n_inner);
      if (std::abs(x1 - x2) < 1e-7 * std::max(x2, 1.0)) {
        have_prev = false;
        continue;
      }
      // The determinant legitimately flips sign across the x1 == x2 diagonal,
      // so sweep segments on either side of x2 are tracked separately.
      if (have_prev && ((prev_x1 < x2) != (x1 < x2))) have_prev = false;
      double raw = 0.0;
      const double rel = rel_det(x1, x2, &raw);
      if (rel < min_rel) { min_rel = rel; min_x1 = x1; min_x2 = x2; }
      if (have_prev && ((prev_raw < 0.0) != (raw < 0.0))) return false;
      prev_raw = raw;
      prev_x1 = x1;
      have_prev = true;
    }
  }
  // Refine the smallest sampled magnitude before applying the threshold.
  const double span = (hi - lo) / n_inner;
  auto [x1r, neg] = detail::golden_max(
      [&](double x1) { return -rel_det(x1, min_x2); },
      std::max(lo, min_x1 - span), std::min(hi, min_x1 + span));
  min_rel = std::min(min_rel, -neg);
  return min_rel > 1e-12;
}

ChebyshevSolution chebyshev_points(const ModelSpec& model, const DesignSpace& space) {
  validate(model);
  validate(space);
  const double p = peak_location(model);
  const double rho = scaling_factor_d1(gamma_factor(model)).rho;
  const double scale = gradient(model, p).norm();

  ActiveSet classified;
  classified.pin_lower = space.s >= p / rho;
  classified.pin_upper = space.bounded() && space.t <= rho * p;

  auto seed_points = [&](const ActiveSet& active,
                         std::uint64_t jitter) -> std::array<double, 3> {
    const double lo = space.s;
    const double hi = space.bounded() ? space.t : 4.0 * rho * p;
    std::array<double, 3> pts{p / rho, p, rho * p};  // geometric seed
    if (active.pin_lower)
      pts[0] = lo;
    else
      pts[0] = std::max(pts[0], lo + 0.02 * (hi - lo));
    if (active.pin_upper)
      pts[2] = hi;
    else if (space.bounded())
      pts[2] = std::min(pts[2], hi - 0.02 * (hi - lo));
    pts[1] = std::clamp(pts[1], pts[0] + 0.1 * (pts[2] - pts[0]),
                        pts[2] - 0.1 * (pts[2] - pts[0]));
    if (jitter != 0) {
      for (int i = 0; i < 3; ++i) {
        const bool pinned = (i == 0 && active.pin_lower) || (i == 2 && active.pin_upper);
        if (pinned) continue;
        pts[i] *= 1.0 + 0.05 * detail::perturbation(jitter * 3 + i);
      }
      std::sort(pts.begin(), pts.end());
      if (active.pin_lower) pts[0] = lo;
      if (active.pin_upper) pts[2] = hi;
    }
    return pts;
  };

  auto try_active_set = [&](const ActiveSet& active,
                            std::uint64_t jitter) -> std::optional<ChebyshevSolution> {
    EquioscillationProblem prob{model, space, active, scale};
    const auto seed = seed_points(active, jitter);
    if (!prob.ordered(seed)) return std::nullopt;
    const auto outcome = newton_solve(prob, seed);
    if (!outcome.converged) return std::nullopt;
    ChebyshevSolution sol;
    sol.points = outcome.points;
    sol.coefficients = outcome.beta / scale;
    sol.level = 1.0;
    const double hint = std::max(100.0 * rho * p, sol.points[2] * 10.0);
    for (double u : bound_check_grid(model, space, hint))
      if (std::abs(sol.phi(model, u)) > 1.0 + kGlobalBoundSlack) return std::nullopt;
    return sol;
  };

  if (auto sol = try_active_set(classified, 0)) return *sol;

  // The classified pinning failed; sweep the remaining active sets and
  // perturbed seeds, collecting every valid solution.
  std::vector<ChebyshevSolution> found;
  std::vector<ActiveSet> candidates{classified};
  for (bool pl : {false, true})
    for (bool pu : {false, true}) {
      if (pu && !space.bounded()) continue;
      if (pl && space.s <= 0.0) continue;
      if (pl == classified.pin_lower && pu == classified.pin_upper) continue;
      candidates.push_back({pl, pu});
    }
  for (std::uint64_t restart = 0; restart < 20 && found.empty(); ++restart)
    for (const auto& active : candidates)
      if (auto sol = try_active_set(active, restart + 1)) found.push_back(*sol);
  if (found.empty())
    throw NoConvergence("chebyshev_points: no equioscillating solution found");
  for (std::size_t i = 1; i < found.size(); ++i)
    for (int k = 0; k < 3; ++k)
      if (std::abs(found[i].points[k] - found[0].points[k]) >
          kSolutionAgreement * std::max(1.0, std::abs(found[0].points[k])))
        throw NoConvergence("chebyshev_points: restarts found distinct solutions");
  return found[0];
}

std::array<double, 3> optimal_weights_for_c(const std::array<double, 3>& points,
                                            const Eigen::Vector3d& c,
                                            const ModelSpec& model) {
  Eigen::Matrix3d X;  // X(i, j) = f_j(s_i)
  for (int i = 0; i < 3; ++i) X.row(i) = gradient(model, points[i]).transpose();
  Eigen::FullPivLU<Eigen::Matrix3d> lu(X.transpose());
  if (!lu.isInvertible())
    throw SingularSystem("optimal_weights_for_c: singular Chebyshev system");
  const Eigen::Vector3d v = lu.solve(c);  // equals (X X^T)^{-1} X c
  const double total = v.cwiseAbs().sum();
  if (!(total > 0.0))
    throw SingularSystem("optimal_weights_for_c: zero weight vector");
  return {std::abs(v[0]) / total, std::abs(v[1]) / total, std::abs(v[2]) / total};
}

}  // namespace iqdesign

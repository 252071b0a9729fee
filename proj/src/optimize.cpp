#include "iqdesign/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "iqdesign/chebyshev.hpp"
#include "iqdesign/detail/search.hpp"
#include "iqdesign/errors.hpp"

namespace iqdesign {

namespace {

constexpr double kBigPenalty = 1e300;

struct ObjectiveContext {
  const ModelSpec& model;
  const Criterion& criterion;
  DesignSpace space;
  Eigen::Vector3d c = Eigen::Vector3d::Zero();  // weight vector target (non-D)
  double separation = 0.0;

  // Weights for a candidate support per the criterion rule. Returns nullopt
  // when the support degenerates.
  std::optional<std::array<double, 3>> weights(const std::array<double, 3>& pts) const {
    if (criterion.kind() == CriterionKind::D)
      return std::array<double, 3>{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    try {
      return optimal_weights_for_c(pts, c, model);
    } catch (const SingularSystem&) {
      return std::nullopt;
    }
  }

  bool feasible(const std::array<double, 3>& pts) const {
    if (!(pts[0] >= space.s) || (space.bounded() && !(pts[2] <= space.t)))
      return false;
    return pts[0] + separation < pts[1] && pts[1] + separation < pts[2];
  }

  // Signed so that smaller is better for every criterion.
  double objective(const std::array<double, 3>& pts) const {
    if (!feasible(pts)) return kBigPenalty;
    const auto w = weights(pts);
    if (!w) return kBigPenalty;
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector3d f = gradient(model, pts[i]);
      m.noalias() += (*w)[i] * (f * f.transpose());
    }
    switch (criterion.kind()) {
      case CriterionKind::D:
        return -m.determinant();
      case CriterionKind::D1: {
        const double det2 = m.topLeftCorner<2, 2>().determinant();
        if (!(std::abs(det2) > 0.0)) return kBigPenalty;
        return -m.determinant() / det2;
      }
      case CriterionKind::E: {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
        return -es.eigenvalues()[0];
      }
      case CriterionKind::C:
      case CriterionKind::Extrapolation: {
        const Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
        if (!lu.isInvertible()) return kBigPenalty;
        const Eigen::Vector3d target = criterion.target_vector(model);
        const double v = target.dot(lu.solve(target));
        return v > 0.0 ? v : kBigPenalty;
      }
    }
    return kBigPenalty;
  }
};

std::vector<int> free_indices(IntervalForm form) {
  switch (form) {
    case IntervalForm::BothPinned: return {1};
    case IntervalForm::LowerPinned: return {1, 2};
    case IntervalForm::UpperPinned: return {0, 1};
    case IntervalForm::Unconstrained: return {0, 1, 2};
  }
  return {};
}

Design pinned_solve(const ObjectiveContext& ctx, IntervalForm form,
                    std::array<double, 3> seed, const SolverConfig& config,
                    std::uint64_t jitter) {
  const auto free = free_indices(form);
  if (form == IntervalForm::LowerPinned || form == IntervalForm::BothPinned)
    seed[0] = ctx.space.s;
  if (form == IntervalForm::UpperPinned || form == IntervalForm::BothPinned)
    seed[2] = ctx.space.t;
  if (jitter != 0) {
    for (int i : free) {
      seed[i] *= 1.0 + 0.05 * detail::perturbation(jitter * 7 + i);
      seed[i] = std::max(seed[i], ctx.space.s + ctx.separation);
      if (ctx.space.bounded())
        seed[i] = std::min(seed[i], ctx.space.t - ctx.separation);
    }
  }
  std::sort(seed.begin(), seed.end());

  auto eval = [&](const std::vector<double>& x) {
    std::array<double, 3> pts = seed;
    for (std::size_t k = 0; k < free.size(); ++k) pts[free[k]] = x[k];
    std::sort(pts.begin(), pts.end());
    return ctx.objective(pts);
  };
  std::vector<double> x0;
  std::vector<double> step;
  const double span = ctx.space.bounded()
                          ? ctx.space.t - ctx.space.s
                          : seed[2] - seed[0];
  for (int i : free) {
    x0.push_back(seed[i]);
    step.push_back(0.05 * span);
  }
  auto [x_best, f_best] = detail::nelder_mead(eval, x0, step, config.max_iterations);
  if (f_best >= kBigPenalty)
    throw NoConvergence("optimal_design: simplex failed to find a feasible support");

  std::array<double, 3> pts = seed;
  for (std::size_t k = 0; k < free.size(); ++k) pts[free[k]] = x_best[k];
  std::sort(pts.begin(), pts.end());

  // Coordinate-wise golden refinement down to the point tolerance.
  for (int round = 0; round < 3; ++round) {
    for (int i : free) {
      const double lo_bound = (i == 0) ? ctx.space.s : pts[i - 1] + ctx.separation;
      const double hi_bound = (i == 2)
                                  ? (ctx.space.bounded() ? ctx.space.t : pts[2] * 4.0)
                                  : pts[i + 1] - ctx.separation;
      const double lo = std::max(lo_bound, pts[i] - 0.25 * (hi_bound - lo_bound));
      const double hi = std::min(hi_bound, pts[i] + 0.25 * (hi_bound - lo_bound));
      if (!(hi > lo)) continue;
      auto slice = [&](double u) {
        std::array<double, 3> q = pts;
        q[i] = u;
        return -ctx.objective(q);
      };
      auto [u_best, v_best] = detail::golden_max(slice, lo, hi,
                                                 config.point_tolerance, 300);
      if (-v_best <= ctx.objective(pts)) pts[i] = u_best;
    }
  }

  const auto w = ctx.weights(pts);
  if (!w) throw NoConvergence("optimal_design: degenerate optimal weights");
  for (double wi : *w)
    if (wi < config.weight_tolerance)
      throw NoConvergence("optimal_design: a support weight collapsed to zero");
  Design d;
  d.points.assign(pts.begin(), pts.end());
  d.weights.assign(w->begin(), w->end());
  return d;
}

}  // namespace

SolveResult optimal_design(const ModelSpec& model, const Criterion& criterion,
                           const DesignSpace& space, const SolverConfig& config) {
  validate(model);
  validate(space);
  if (criterion.kind() == CriterionKind::Extrapolation &&
      space.contains(criterion.xe()))
    throw ValidationError(
        "extrapolation point must lie outside the design space");

  SolveResult result;
  const IntervalForm form = classify_interval(model, criterion, space);

  if (form == IntervalForm::Unconstrained &&
      criterion.kind() != CriterionKind::C) {
    result.design = unbounded_design(model, criterion, &result.warnings);
    result.report = check_optimality(result.design, criterion, model, space,
                                     config.equivalence_tolerance);
    if (result.report.passed) return result;
    result.warnings.push_back(
        "closed-form design failed its equivalence check; falling back to the "
        "numeric solver");
  }

  ObjectiveContext ctx{model, criterion, space};
  ctx.separation = 1e-9 * (space.bounded()
                               ? space.t - space.s
                               : scaling_factor(model, criterion).rho *
                                     peak_location(model));
  if (criterion.kind() == CriterionKind::E)
    ctx.c = chebyshev_points(model, space).coefficients;
  else if (criterion.kind() != CriterionKind::D)
    ctx.c = criterion.target_vector(model);

  std::array<double, 3> seed{};
  if (criterion.kind() == CriterionKind::D) {
    const double rho = scaling_factor_d(gamma_factor(model)).rho;
    const double p = peak_location(model);
    seed = {std::max(space.s, p / rho), p,
            space.bounded() ? std::min(space.t, rho * p) : rho * p};
    seed[1] = std::clamp(seed[1], seed[0] + 0.1 * (seed[2] - seed[0]),
                         seed[2] - 0.1 * (seed[2] - seed[0]));
  } else {
    seed = chebyshev_points(model, space).points;
  }

  std::optional<SolveResult> best;
  for (std::uint64_t attempt = 0; attempt <= 10; ++attempt) {
    Design candidate;
    try {
      candidate = pinned_solve(ctx, form, seed, config, attempt);
    } catch (const NoConvergence&) {
      continue;
    }
    OptimalityReport report = check_optimality(candidate, criterion, model, space,
                                               config.equivalence_tolerance);
    if (!best || report.violation < best->report.violation) {
      best = SolveResult{candidate, report, result.warnings};
      if (report.passed) return *best;
    }
  }
  if (!best)
    throw NoConvergence("optimal_design: no feasible candidate design found");
  if (!best->report.passed)
    throw NoConvergence(
        "optimal_design: equivalence violation " +
        std::to_string(best->report.violation) + " at u = " +
        std::to_string(best->report.argmax_u) + " exceeds tolerance");
  return *best;
}

Design grid_oracle(const ModelSpec& model, const Criterion& criterion,
                   const DesignSpace& space, int grid_size) {
  validate(model);
  validate(space);
  if (!space.bounded())
    throw UnsupportedSpace("grid_oracle requires a bounded design space");
  if (grid_size < 3) throw ValidationError("grid_oracle requires grid_size >= 3");

  std::vector<double> grid(grid_size);
  for (int i = 0; i < grid_size; ++i)
    grid[i] = space.s + (space.t - space.s) * i / (grid_size - 1.0);

  std::vector<Eigen::Vector3d> f(grid_size);
  for (int i = 0; i < grid_size; ++i) f[i] = gradient(model, grid[i]);

  Eigen::Vector3d cvec = Eigen::Vector3d::Zero();
  if (criterion.kind() == CriterionKind::E)
    cvec = chebyshev_points(model, space).coefficients;
  else if (criterion.kind() != CriterionKind::D)
    cvec = criterion.target_vector(model);

  const bool minimizing = criterion.minimizing();
  double best_value = minimizing ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
  std::array<int, 3> best_idx{-1, -1, -1};
  std::array<double, 3> best_w{};

  for (int i = 0; i < grid_size - 2; ++i) {
    for (int j = i + 1; j < grid_size - 1; ++j) {
      for (int k = j + 1; k < grid_size; ++k) {
        std::array<double, 3> w{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
        if (criterion.kind() != CriterionKind::D) {
          Eigen::Matrix3d Xt;
          Xt.col(0) = f[i];
          Xt.col(1) = f[j];
          Xt.col(2) = f[k];
          const Eigen::FullPivLU<Eigen::Matrix3d> lu(Xt);
          if (!lu.isInvertible()) continue;
          const Eigen::Vector3d v = lu.solve(cvec);
          const double total = v.cwiseAbs().sum();
          if (!(total > 0.0)) continue;
          w = {std::abs(v[0]) / total, std::abs(v[1]) / total,
               std::abs(v[2]) / total};
        }
        Eigen::Matrix3d m = w[0] * (f[i] * f[i].transpose());
        m.noalias() += w[1] * (f[j] * f[j].transpose());
        m.noalias() += w[2] * (f[k] * f[k].transpose());
        double value;
        switch (criterion.kind()) {
          case CriterionKind::D:
            value = m.determinant();
            break;
          case CriterionKind::D1: {
            const double det2 = m.topLeftCorner<2, 2>().determinant();
            if (!(std::abs(det2) > 0.0)) continue;
            value = m.determinant() / det2;
            break;
          }
          case CriterionKind::E: {
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
            value = es.eigenvalues()[0];
            break;
          }
          default: {
            const Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
            if (!lu.isInvertible()) continue;
            const Eigen::Vector3d target = criterion.target_vector(model);
            value = target.dot(lu.solve(target));
            if (!(value > 0.0)) continue;
            break;
          }
        }
        if (!std::isfinite(value)) continue;
        const bool better = minimizing ? value < best_value : value > best_value;
        if (better) {
          best_value = value;
          best_idx = {i, j, k};
          best_w = w;
        }
      }
    }
  }
  if (best_idx[0] < 0)
    throw NoConvergence("grid_oracle: no nondegenerate 3-point support on the grid");
  Design d;
  for (int idx : best_idx) d.points.push_back(grid[idx]);
  d.weights.assign(best_w.begin(), best_w.end());
  return d;
}

}  // namespace iqdesign

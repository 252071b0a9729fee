#include "iqdesign/design.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "iqdesign/errors.hpp"

namespace iqdesign {

namespace {
constexpr double kRankThreshold = 1e-10;       // relative to lambda_max
constexpr double kEstimableResidual = 1e-8;    // relative to |c|
constexpr double kWeightSumTolerance = 1e-12;  // for in-memory designs
constexpr double kFileWeightSumTolerance = 1e-9;
}  // namespace

void validate(const DesignSpace& space) {
  if (!(space.s >= 0.0)) throw ValidationError("design space requires s >= 0");
  if (!(space.s < space.t)) throw UnsupportedSpace("design space requires s < t");
}

static void validate_design_impl(const Design& design, const DesignSpace* space) {
  const std::size_t r = design.points.size();
  if (r == 0) throw ValidationError("design has no support points");
  if (design.weights.size() != r)
    throw ValidationError("design points/weights length mismatch");
  double sum = 0.0;
  for (double w : design.weights) {
    if (!(w > 0.0)) throw ValidationError("design weights must be strictly positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance)
    throw ValidationError("design weights must sum to 1");
  double scale;
  if (space && space->bounded())
    scale = space->t - space->s;
  else
    scale = std::max(std::abs(design.points.back()), 1.0);
  for (std::size_t i = 0; i < r; ++i) {
    const double u = design.points[i];
    if (!std::isfinite(u) || u < 0.0)
      throw ValidationError("design points must be finite and nonnegative");
    if (i > 0) {
      if (!(design.points[i - 1] < u))
        throw ValidationError("design points must be strictly increasing");
      if (u - design.points[i - 1] < 1e-9 * scale)
        throw ValidationError("design points closer than 1e-9 of the space width");
    }
    if (space && !space->contains(u))
      throw ValidationError("design point outside the design space");
  }
}

void validate(const Design& design, const DesignSpace& space) {
  validate(space);
  validate_design_impl(design, &space);
}

void validate(const Design& design) { validate_design_impl(design, nullptr); }

InformationMatrix information_matrix(const Design& design, const ModelSpec& model) {
  InformationMatrix result;
  for (std::size_t i = 0; i < design.points.size(); ++i) {
    const Eigen::Vector3d f = gradient(model, design.points[i]);
    result.m.noalias() += design.weights[i] * (f * f.transpose());
  }
  return result;
}

std::string to_string(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::D: return "D";
    case CriterionKind::E: return "E";
    case CriterionKind::D1: return "D1";
    case CriterionKind::C: return "c";
    case CriterionKind::Extrapolation: return "ce";
  }
  return "?";
}

Criterion Criterion::c_vector(const Eigen::Vector3d& c) {
  if (c.norm() == 0.0) throw ValidationError("c-criterion requires a nonzero vector");
  Criterion crit(CriterionKind::C);
  crit.c_ = c;
  return crit;
}

Criterion Criterion::extrapolation(double xe) {
  if (!(xe > 0.0) || !std::isfinite(xe))
    throw ValidationError("extrapolation point must be positive and finite");
  Criterion crit(CriterionKind::Extrapolation);
  crit.xe_ = xe;
  return crit;
}

const Eigen::Vector3d& Criterion::c() const {
  if (kind_ != CriterionKind::C)
    throw UnsupportedCriterion("criterion carries no c-vector");
  return c_;
}

double Criterion::xe() const {
  if (kind_ != CriterionKind::Extrapolation)
    throw UnsupportedCriterion("criterion carries no extrapolation point");
  return xe_;
}

Eigen::Vector3d Criterion::target_vector(const ModelSpec& model) const {
  switch (kind_) {
    case CriterionKind::D1: return Eigen::Vector3d(0.0, 0.0, 1.0);
    case CriterionKind::C: return c_;
    case CriterionKind::Extrapolation: return gradient(model, xe_);
    default:
      throw UnsupportedCriterion("criterion " + to_string(kind_) +
                                 " has no target vector");
  }
}

std::string Criterion::name() const {
  if (kind_ == CriterionKind::Extrapolation)
    return "ce(" + std::to_string(xe_) + ")";
  return to_string(kind_);
}

bool estimable(const Eigen::Vector3d& c, const InformationMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.m);
  const Eigen::Vector3d evals = es.eigenvalues();
  const double lmax = evals.cwiseAbs().maxCoeff();
  if (lmax == 0.0) return false;
  Eigen::Vector3d projected = Eigen::Vector3d::Zero();
  for (int i = 0; i < 3; ++i) {
    if (evals[i] > kRankThreshold * lmax) {
      const Eigen::Vector3d v = es.eigenvectors().col(i);
      projected += v * (v.dot(c));
    }
  }
  return (c - projected).norm() <= kEstimableResidual * c.norm();
}

Eigen::Matrix3d pseudo_inverse(const InformationMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.m);
  const Eigen::Vector3d evals = es.eigenvalues();
  const double lmax = evals.cwiseAbs().maxCoeff();
  Eigen::Matrix3d inv = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) {
    if (lmax > 0.0 && evals[i] > kRankThreshold * lmax) {
      const Eigen::Vector3d v = es.eigenvectors().col(i);
      inv.noalias() += (v * v.transpose()) / evals[i];
    }
  }
  return inv;
}

double generalized_c_form(const Eigen::Vector3d& c, const InformationMatrix& m) {
  if (!estimable(c, m))
    throw NotEstimable("c is not in the range of the information matrix");
  return c.dot(pseudo_inverse(m) * c);
}

double criterion_value(const Design& design, const Criterion& criterion,
                       const ModelSpec& model) {
  const InformationMatrix m = information_matrix(design, model);
  switch (criterion.kind()) {
    case CriterionKind::D:
      return m.m.determinant();
    case CriterionKind::E: {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.m);
      return es.eigenvalues()[0];
    }
    case CriterionKind::D1: {
      const Eigen::Matrix2d mt = m.m.topLeftCorner<2, 2>();
      const double det_mt = mt.determinant();
      const double scale = mt.norm();
      if (scale == 0.0 || std::abs(det_mt) <= 1e-24 * scale * scale)
        throw SingularMatrix("D1 criterion: reduced information matrix is singular");
      return m.m.determinant() / det_mt;
    }
    case CriterionKind::C:
    case CriterionKind::Extrapolation:
      return generalized_c_form(criterion.target_vector(model), m);
  }
  throw UnsupportedCriterion("unknown criterion");
}

double efficiency(const Design& design, const Criterion& criterion,
                  const Design& reference_optimal, const ModelSpec& model,
                  DEfficiencyConvention convention) {
  const double value = criterion_value(design, criterion, model);
  const double best = criterion_value(reference_optimal, criterion, model);
  if (!std::isfinite(value) || !std::isfinite(best))
    throw NoConvergence("efficiency: criterion values must be finite");
  double ratio = criterion.minimizing() ? best / value : value / best;
  if (criterion.kind() == CriterionKind::D) {
    switch (convention) {
      case DEfficiencyConvention::SqrtDetRatio: ratio = std::sqrt(ratio); break;
      case DEfficiencyConvention::DetRatio: break;
      case DEfficiencyConvention::CubeRootDetRatio: ratio = std::cbrt(ratio); break;
    }
  }
  return 100.0 * ratio;
}

std::vector<int> apportion(const Design& design, int n) {
  const int r = static_cast<int>(design.size());
  if (n < r)
    throw InfeasibleApportionment("cannot apportion " + std::to_string(n) +
                                  " runs over " + std::to_string(r) + " points");
  std::vector<int> counts(r);
  for (int i = 0; i < r; ++i)
    counts[i] = std::max(1, static_cast<int>(
        std::ceil((n - 0.5 * r) * design.weights[i] - 1e-12)));
  int total = std::accumulate(counts.begin(), counts.end(), 0);
  while (total > n) {
    int k = 0;
    double best = -1.0;
    for (int i = 0; i < r; ++i) {
      if (counts[i] <= 1) continue;
      const double ratio = (counts[i] - 1.0) / design.weights[i];
      if (ratio > best) { best = ratio; k = i; }
    }
    --counts[k];
    --total;
  }
  while (total < n) {
    int k = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < r; ++i) {
      const double ratio = counts[i] / design.weights[i];
      if (ratio < best) { best = ratio; k = i; }
    }
    ++counts[k];
    ++total;
  }
  // Quota repair: move units from the most over-represented entry to the
  // most under-represented one until every count is within one of n*w_i.
  // (The floor n_i >= 1 can make the quota unattainable for very skewed
  // weights; the repair then stops at the feasible optimum.)
  for (int pass = 0; pass < n + r; ++pass) {
    int lo = -1, hi = -1;
    double dev_lo = 0.0, dev_hi = 0.0;
    for (int i = 0; i < r; ++i) {
      const double dev = counts[i] - n * design.weights[i];
      if (dev < dev_lo) { dev_lo = dev; lo = i; }
      if (counts[i] > 1 && dev > dev_hi) { dev_hi = dev; hi = i; }
    }
    if (lo < 0 || hi < 0) break;
    if (dev_lo >= -1.0 - 1e-9 && dev_hi <= 1.0 + 1e-9) break;
    --counts[hi];
    ++counts[lo];
  }
  return counts;
}

nlohmann::json to_json(const DesignFile& file) {
  nlohmann::json j;
  j["model"] = {{"kind", to_string(file.model.kind)},
                {"theta", file.model.theta}};
  j["space"]["s"] = file.space.s;
  if (file.space.bounded())
    j["space"]["t"] = file.space.t;
  else
    j["space"]["t"] = "inf";
  j["points"] = file.design.points;
  j["weights"] = file.design.weights;
  return j;
}

DesignFile design_file_from_json(const nlohmann::json& j) {
  DesignFile file;
  file.model.kind = model_kind_from_string(j.at("model").at("kind").get<std::string>());
  const auto theta = j.at("model").at("theta").get<std::vector<double>>();
  if (theta.size() != 3) throw ValidationError("model.theta must have 3 entries");
  std::copy(theta.begin(), theta.end(), file.model.theta.begin());
  validate(file.model);
  file.space.s = j.at("space").at("s").get<double>();
  const auto& t = j.at("space").at("t");
  if (t.is_string()) {
    if (t.get<std::string>() != "inf")
      throw ValidationError("space.t must be a number or \"inf\"");
    file.space.t = std::numeric_limits<double>::infinity();
  } else {
    file.space.t = t.get<double>();
  }
  validate(file.space);
  file.design.points = j.at("points").get<std::vector<double>>();
  file.design.weights = j.at("weights").get<std::vector<double>>();
  const double sum = std::accumulate(file.design.weights.begin(),
                                     file.design.weights.end(), 0.0);
  if (std::abs(sum - 1.0) > kFileWeightSumTolerance)
    throw ValidationError("design file weights must sum to 1 within 1e-9");
  for (double& w : file.design.weights) w /= sum;
  validate(file.design, file.space);
  return file;
}

DesignFile load_design_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open design file: " + path);
  nlohmann::json j;
  in >> j;
  return design_file_from_json(j);
}

void save_design_file(const DesignFile& file, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write design file: " + path);
  out << to_json(file).dump(2) << "\n";
}

}  // namespace iqdesign

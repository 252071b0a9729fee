#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "iqdesign/model.hpp"

#include "json.hpp"

namespace iqdesign {

// Design interval [s, t]; t may be +inf.
struct DesignSpace {
  double s = 0.0;
  double t = std::numeric_limits<double>::infinity();

  bool bounded() const { return std::isfinite(t); }
  bool contains(double u) const { return u >= s && u <= t; }
};

void validate(const DesignSpace& space);

// Probability measure with finite support: strictly increasing points with
// positive weights summing to 1.
struct Design {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

// Throws ValidationError on ordering/weight/duplicate violations. Points must
// lie in `space`; support points closer than 1e-9*(t-s) (or 1e-9 relative for
// unbounded spaces) are rejected as duplicates.
void validate(const Design& design, const DesignSpace& space);
void validate(const Design& design);

struct InformationMatrix {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
};

// M = sum_i w_i f(u_i) f(u_i)^T.
InformationMatrix information_matrix(const Design& design, const ModelSpec& model);

enum class CriterionKind { D, E, D1, C, Extrapolation };

std::string to_string(CriterionKind kind);

// Tagged optimality criterion. D, E and D1 are maximized; C and Extrapolation
// are minimized.
class Criterion {
 public:
  static Criterion d() { return Criterion(CriterionKind::D); }
  static Criterion e() { return Criterion(CriterionKind::E); }
  static Criterion d1() { return Criterion(CriterionKind::D1); }
  static Criterion c_vector(const Eigen::Vector3d& c);
  static Criterion extrapolation(double xe);

  CriterionKind kind() const { return kind_; }
  const Eigen::Vector3d& c() const;
  double xe() const;

  bool minimizing() const {
    return kind_ == CriterionKind::C || kind_ == CriterionKind::Extrapolation;
  }

  // The c-vector the criterion targets: (0,0,1) for D1, c for C, f(xe) for
  // Extrapolation. Throws UnsupportedCriterion for D and E.
  Eigen::Vector3d target_vector(const ModelSpec& model) const;

  std::string name() const;

 private:
  explicit Criterion(CriterionKind kind) : kind_(kind) {}
  CriterionKind kind_;
  Eigen::Vector3d c_ = Eigen::Vector3d::Zero();
  double xe_ = 0.0;
};

// D -> det M; E -> lambda_min(M); D1 -> |M|/|M~| (M~ = M with last row and
// column deleted); C(c) -> c^T M^- c; Extrapolation(xe) -> C(f(xe)).
double criterion_value(const Design& design, const Criterion& criterion,
                       const ModelSpec& model);

// True iff c lies in the column space of m (eigenvalues below
// 1e-10*lambda_max treated as zero, residual tolerance 1e-8*|c|).
bool estimable(const Eigen::Vector3d& c, const InformationMatrix& m);

// c^T M^- c via the eigenvalue pseudo-inverse; invariant to the choice of
// generalized inverse. Throws NotEstimable.
double generalized_c_form(const Eigen::Vector3d& c, const InformationMatrix& m);

// Pseudo-inverse with the same rank threshold as estimable().
Eigen::Matrix3d pseudo_inverse(const InformationMatrix& m);

// Convention for the D-efficiency ratio det(M)/det(M*). The square-root
// convention reproduces the published efficiency table for the lactation
// case study and is the default; the others are selectable in the CLI.
enum class DEfficiencyConvention { SqrtDetRatio, DetRatio, CubeRootDetRatio };

// 100 * Phi(design)/Phi(reference) for maximization criteria and
// 100 * Phi(reference)/Phi(design) for minimization criteria.
double efficiency(const Design& design, const Criterion& criterion,
                  const Design& reference_optimal, const ModelSpec& model,
                  DEfficiencyConvention convention = DEfficiencyConvention::SqrtDetRatio);

// Rounds weights to integer counts summing to n, each count >= 1, using
// efficient rounding: start at ceil((n - r/2) w_i), then repair the total by
// stepping the entries with extreme count/weight ratios.
std::vector<int> apportion(const Design& design, int n);

// JSON design file:
// {"model": {"kind": "P1"|"P2", "theta": [a,b,c]},
//  "space": {"s": x, "t": y|"inf"}, "points": [...], "weights": [...]}
struct DesignFile {
  ModelSpec model;
  DesignSpace space;
  Design design;
};

nlohmann::json to_json(const DesignFile& file);
DesignFile design_file_from_json(const nlohmann::json& j);
DesignFile load_design_file(const std::string& path);
void save_design_file(const DesignFile& file, const std::string& path);

}  // namespace iqdesign

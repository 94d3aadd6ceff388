#ifndef NFG_GRAPH_HPP
#define NFG_GRAPH_HPP

#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "nfg/geom.hpp"

namespace nfg {

enum class VarKind { kPose2, kPoint2 };

inline int var_dim(VarKind kind) { return kind == VarKind::kPose2 ? 3 : 2; }

struct VariableDecl {
  std::string name;
  VarKind kind;
};

// Measurement models. Candidate landmarks of an ambiguous range live in the
// factor's variable list (entries 1..k), not in the model struct.
struct PriorPose2 {
  Pose2 mean;
  Eigen::Matrix3d cov;
};
struct PriorPoint2 {
  Point2 mean;
  Eigen::Matrix2d cov;
};
struct OdometryPose2 {
  Pose2 rel;
  Eigen::Matrix3d cov;
};
struct Range {
  double z;
  double sigma;
};
struct AmbiguousRange {
  double z;
  double sigma;
};

using FactorModel = std::variant<PriorPose2, PriorPoint2, OdometryPose2, Range, AmbiguousRange>;

struct Factor {
  int id = -1;
  std::vector<std::string> vars;
  FactorModel model;
  // Variable indices resolved against the owning graph.
  std::vector<int> var_ids;

  bool is_prior() const {
    return std::holds_alternative<PriorPose2>(model) || std::holds_alternative<PriorPoint2>(model);
  }
  bool is_ambiguous() const { return std::holds_alternative<AmbiguousRange>(model); }
};

using VarValue = std::variant<Pose2, Point2>;

// Values for every variable of a graph, indexed in declaration order.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n) : values_(n) {}

  std::size_t size() const { return values_.size(); }

  const VarValue& value(int i) const { return values_[i]; }
  VarValue& value(int i) { return values_[i]; }

  const Pose2& pose(int i) const { return std::get<Pose2>(values_[i]); }
  const Point2& point(int i) const { return std::get<Point2>(values_[i]); }

  void set(int i, const Pose2& p) { values_[i] = p; }
  void set(int i, const Point2& p) { values_[i] = p; }

  // Translation component of either a pose or a point variable.
  Eigen::Vector2d translation(int i) const;

 private:
  std::vector<VarValue> values_;
};

class FactorGraph {
 public:
  // Returns the new variable's index. Names must be unique, nonempty, and
  // free of whitespace.
  int add_variable(const std::string& name, VarKind kind);

  // Returns the new factor's id (== its insertion index). Checks arity,
  // variable existence/kind, and SPD covariances.
  int add_factor(const std::vector<std::string>& vars, const FactorModel& model);

  void set_truth(const std::string& name, const VarValue& value);

  const std::vector<VariableDecl>& variables() const { return variables_; }
  const std::vector<Factor>& factors() const { return factors_; }
  const Factor& factor(int id) const { return factors_[id]; }

  bool has_variable(const std::string& name) const { return index_.count(name) > 0; }
  int index_of(const std::string& name) const;

  bool has_truth(const std::string& name) const { return truth_.count(name) > 0; }
  bool has_full_truth() const { return truth_.size() == variables_.size(); }
  const VarValue& truth_of(const std::string& name) const;
  // Assignment built from TRUTH records; requires one per variable.
  Assignment truth_assignment() const;

  // Total tangent/sample dimensionality of the variable set.
  int total_dim() const;

  // Structural checks beyond what add_* enforces: at least one prior factor
  // must anchor the gauge. Throws Error(kValidation).
  void validate() const;

  double factor_log_density(int factor_id, const Assignment& a) const;
  double total_log_density(const Assignment& a) const;

  // Flattened coordinate labels, e.g. "x0.x", "x0.y", "x0.theta".
  std::vector<std::string> coordinate_labels() const;
  Eigen::VectorXd flatten(const Assignment& a) const;
  Assignment unflatten(const Eigen::VectorXd& row) const;

 private:
  struct FactorCache {
    // Whitened-residual factors: sqrt_info = L^-1 with cov = L L^T.
    Eigen::Matrix3d sqrt_info3;
    Eigen::Matrix2d sqrt_info2;
    Eigen::Matrix3d chol3;  // lower Cholesky factor of the covariance
    Eigen::Matrix2d chol2;
    double log_norm = 0.0;  // -0.5 * log((2 pi)^k det cov)
  };

  std::vector<VariableDecl> variables_;
  std::vector<Factor> factors_;
  std::vector<FactorCache> cache_;
  std::unordered_map<std::string, int> index_;
  std::unordered_map<std::string, VarValue> truth_;

  double range_log_density(double z, double sigma, const Eigen::Vector2d& a,
                           const Eigen::Vector2d& b, double log_norm) const;
};

// Deep copy with one factor's model/vars replaced; used when fixing a data
// association. Keeps ids and ordering intact.
FactorGraph replace_factor(const FactorGraph& g, int factor_id,
                           const std::vector<std::string>& vars, const FactorModel& model);

}  // namespace nfg

#endif  // NFG_GRAPH_HPP

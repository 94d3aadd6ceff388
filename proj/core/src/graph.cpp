#include "nfg/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <Eigen/Cholesky>

#include "nfg/errors.hpp"

namespace nfg {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

template <int N>
void spd_cache(const Eigen::Matrix<double, N, N>& cov, Eigen::Matrix<double, N, N>& chol,
               Eigen::Matrix<double, N, N>& sqrt_info, double& log_norm) {
  if (!cov.isApprox(cov.transpose(), 1e-12)) {
    throw Error(ErrorCode::kValidation, "covariance is not symmetric");
  }
  Eigen::LLT<Eigen::Matrix<double, N, N>> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kValidation, "covariance is not positive definite");
  }
  chol = llt.matrixL();
  sqrt_info = chol.template triangularView<Eigen::Lower>().solve(
      Eigen::Matrix<double, N, N>::Identity());
  double log_det = 0.0;
  for (int i = 0; i < N; ++i) log_det += 2.0 * std::log(chol(i, i));
  log_norm = -0.5 * (N * kLog2Pi + log_det);
}

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  return std::none_of(name.begin(), name.end(),
                      [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

Eigen::Vector2d Assignment::translation(int i) const {
  if (const Pose2* p = std::get_if<Pose2>(&values_[i])) return p->translation();
  return std::get<Point2>(values_[i]).vec();
}

int FactorGraph::add_variable(const std::string& name, VarKind kind) {
  if (!valid_name(name)) {
    throw Error(ErrorCode::kValidation, "invalid variable name '" + name + "'");
  }
  if (index_.count(name) > 0) {
    throw Error(ErrorCode::kValidation, "duplicate variable '" + name + "'");
  }
  const int idx = static_cast<int>(variables_.size());
  variables_.push_back({name, kind});
  index_.emplace(name, idx);
  return idx;
}

int FactorGraph::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw Error(ErrorCode::kValidation, "unknown variable '" + name + "'");
  }
  return it->second;
}

int FactorGraph::add_factor(const std::vector<std::string>& vars, const FactorModel& model) {
  Factor f;
  f.id = static_cast<int>(factors_.size());
  f.vars = vars;
  f.model = model;
  f.var_ids.reserve(vars.size());
  for (const auto& v : vars) f.var_ids.push_back(index_of(v));

  auto expect_kind = [&](int slot, VarKind kind, const char* what) {
    if (variables_[f.var_ids[slot]].kind != kind) {
      throw Error(ErrorCode::kValidation,
                  "variable '" + vars[slot] + "' must be a " + what);
    }
  };
  auto expect_arity = [&](std::size_t n, const char* what) {
    if (vars.size() != n) {
      throw Error(ErrorCode::kValidation, std::string(what) + ": arity mismatch");
    }
  };

  FactorCache cache;
  if (const auto* m = std::get_if<PriorPose2>(&model)) {
    expect_arity(1, "PRIOR_POSE2");
    expect_kind(0, VarKind::kPose2, "POSE2");
    spd_cache<3>(m->cov, cache.chol3, cache.sqrt_info3, cache.log_norm);
  } else if (const auto* m = std::get_if<PriorPoint2>(&model)) {
    expect_arity(1, "PRIOR_POINT2");
    expect_kind(0, VarKind::kPoint2, "POINT2");
    spd_cache<2>(m->cov, cache.chol2, cache.sqrt_info2, cache.log_norm);
  } else if (const auto* m = std::get_if<OdometryPose2>(&model)) {
    expect_arity(2, "ODOM_POSE2");
    expect_kind(0, VarKind::kPose2, "POSE2");
    expect_kind(1, VarKind::kPose2, "POSE2");
    spd_cache<3>(m->cov, cache.chol3, cache.sqrt_info3, cache.log_norm);
  } else if (const auto* m = std::get_if<Range>(&model)) {
    expect_arity(2, "RANGE");
    if (!(m->sigma > 0.0)) throw Error(ErrorCode::kValidation, "RANGE: sigma must be > 0");
    cache.log_norm = -0.5 * (kLog2Pi + 2.0 * std::log(m->sigma));
  } else if (const auto* m = std::get_if<AmbiguousRange>(&model)) {
    if (vars.size() < 3) {
      throw Error(ErrorCode::kValidation, "AMB_RANGE: needs at least two candidates");
    }
    expect_kind(0, VarKind::kPose2, "POSE2");
    for (std::size_t i = 1; i < vars.size(); ++i) {
      expect_kind(static_cast<int>(i), VarKind::kPoint2, "POINT2");
    }
    if (!(m->sigma > 0.0)) throw Error(ErrorCode::kValidation, "AMB_RANGE: sigma must be > 0");
    cache.log_norm = -0.5 * (kLog2Pi + 2.0 * std::log(m->sigma));
  }

  factors_.push_back(std::move(f));
  cache_.push_back(cache);
  return factors_.back().id;
}

void FactorGraph::set_truth(const std::string& name, const VarValue& value) {
  const int idx = index_of(name);
  const bool is_pose = std::holds_alternative<Pose2>(value);
  if (is_pose != (variables_[idx].kind == VarKind::kPose2)) {
    throw Error(ErrorCode::kValidation, "truth kind mismatch for '" + name + "'");
  }
  truth_[name] = value;
}

const VarValue& FactorGraph::truth_of(const std::string& name) const {
  auto it = truth_.find(name);
  if (it == truth_.end()) {
    throw Error(ErrorCode::kValidation, "no truth recorded for '" + name + "'");
  }
  return it->second;
}

Assignment FactorGraph::truth_assignment() const {
  Assignment a(variables_.size());
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    a.value(static_cast<int>(i)) = truth_of(variables_[i].name);
  }
  return a;
}

int FactorGraph::total_dim() const {
  int dim = 0;
  for (const auto& v : variables_) dim += var_dim(v.kind);
  return dim;
}

void FactorGraph::validate() const {
  if (variables_.empty()) {
    throw Error(ErrorCode::kValidation, "graph has no variables");
  }
  const bool anchored = std::any_of(factors_.begin(), factors_.end(),
                                    [](const Factor& f) { return f.is_prior(); });
  if (!anchored) {
    throw Error(ErrorCode::kValidation,
                "graph has no prior factor; the global frame is unanchored");
  }
}

double FactorGraph::range_log_density(double z, double sigma, const Eigen::Vector2d& a,
                                      const Eigen::Vector2d& b, double log_norm) const {
  const double r = z - (a - b).norm();
  return -0.5 * r * r / (sigma * sigma) + log_norm;
}

double FactorGraph::factor_log_density(int factor_id, const Assignment& a) const {
  if (a.size() != variables_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "assignment does not cover the graph");
  }
  const Factor& f = factors_[factor_id];
  const FactorCache& c = cache_[factor_id];

  if (const auto* m = std::get_if<PriorPose2>(&f.model)) {
    const Eigen::Vector3d r = se2_log(se2_between(m->mean, a.pose(f.var_ids[0]))).vec();
    return -0.5 * (c.sqrt_info3 * r).squaredNorm() + c.log_norm;
  }
  if (const auto* m = std::get_if<PriorPoint2>(&f.model)) {
    const Eigen::Vector2d r = a.point(f.var_ids[0]).vec() - m->mean.vec();
    return -0.5 * (c.sqrt_info2 * r).squaredNorm() + c.log_norm;
  }
  if (const auto* m = std::get_if<OdometryPose2>(&f.model)) {
    const Pose2 rel = se2_between(a.pose(f.var_ids[0]), a.pose(f.var_ids[1]));
    const Eigen::Vector3d r = se2_log(se2_between(m->rel, rel)).vec();
    return -0.5 * (c.sqrt_info3 * r).squaredNorm() + c.log_norm;
  }
  if (const auto* m = std::get_if<Range>(&f.model)) {
    return range_log_density(m->z, m->sigma, a.translation(f.var_ids[0]),
                             a.translation(f.var_ids[1]), c.log_norm);
  }
  const auto& m = std::get<AmbiguousRange>(f.model);
  const Eigen::Vector2d t0 = a.translation(f.var_ids[0]);
  const std::size_t k = f.var_ids.size() - 1;
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(k);
  for (std::size_t i = 0; i < k; ++i) {
    terms[i] = range_log_density(m.z, m.sigma, t0, a.translation(f.var_ids[i + 1]), c.log_norm);
    max_term = std::max(max_term, terms[i]);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  return max_term + std::log(sum) - std::log(static_cast<double>(k));
}

double FactorGraph::total_log_density(const Assignment& a) const {
  double total = 0.0;
  for (const auto& f : factors_) total += factor_log_density(f.id, a);
  return total;
}

std::vector<std::string> FactorGraph::coordinate_labels() const {
  std::vector<std::string> labels;
  labels.reserve(total_dim());
  for (const auto& v : variables_) {
    labels.push_back(v.name + ".x");
    labels.push_back(v.name + ".y");
    if (v.kind == VarKind::kPose2) labels.push_back(v.name + ".theta");
  }
  return labels;
}

Eigen::VectorXd FactorGraph::flatten(const Assignment& a) const {
  Eigen::VectorXd row(total_dim());
  int j = 0;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].kind == VarKind::kPose2) {
      const Pose2& p = a.pose(static_cast<int>(i));
      row[j++] = p.x;
      row[j++] = p.y;
      row[j++] = p.theta;
    } else {
      const Point2& p = a.point(static_cast<int>(i));
      row[j++] = p.x;
      row[j++] = p.y;
    }
  }
  return row;
}

Assignment FactorGraph::unflatten(const Eigen::VectorXd& row) const {
  if (row.size() != total_dim()) {
    throw Error(ErrorCode::kInvalidArgument, "flattened row has wrong dimension");
  }
  Assignment a(variables_.size());
  int j = 0;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].kind == VarKind::kPose2) {
      a.set(static_cast<int>(i), Pose2(row[j], row[j + 1], row[j + 2]));
      j += 3;
    } else {
      a.set(static_cast<int>(i), Point2{row[j], row[j + 1]});
      j += 2;
    }
  }
  return a;
}

FactorGraph replace_factor(const FactorGraph& g, int factor_id,
                           const std::vector<std::string>& vars, const FactorModel& model) {
  FactorGraph out;
  for (const auto& v : g.variables()) out.add_variable(v.name, v.kind);
  for (const auto& f : g.factors()) {
    if (f.id == factor_id) {
      out.add_factor(vars, model);
    } else {
      out.add_factor(f.vars, f.model);
    }
  }
  for (const auto& v : g.variables()) {
    if (g.has_truth(v.name)) out.set_truth(v.name, g.truth_of(v.name));
  }
  return out;
}

}  // namespace nfg

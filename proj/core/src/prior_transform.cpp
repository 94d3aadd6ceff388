#include "nfg/prior_transform.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "nfg/errors.hpp"

namespace nfg {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr double kRadiusFloor = 1e-9;

Eigen::Matrix3d lower_chol3(const Eigen::Matrix3d& cov) {
  return Eigen::LLT<Eigen::Matrix3d>(cov).matrixL();
}

Eigen::Matrix2d lower_chol2(const Eigen::Matrix2d& cov) {
  return Eigen::LLT<Eigen::Matrix2d>(cov).matrixL();
}

}  // namespace

PriorLayout PriorLayout::build(const FactorGraph& g, const Decomposition& d) {
  PriorLayout layout;
  layout.graph_ = &g;

  std::vector<char> covered(g.variables().size(), 0);
  int offset = 0;
  for (int id : d.ac) {
    const Factor& f = g.factor(id);
    Entry e;
    e.factor_id = id;
    e.offset = offset;
    int width = 0;

    if (const auto* m = std::get_if<PriorPose2>(&f.model)) {
      e.step = Step::kPriorPose;
      e.new_var = f.var_ids[0];
      e.known_var = -1;
      e.chol3 = lower_chol3(m->cov);
      width = 3;
      if (covered[e.new_var]) {
        throw Error(ErrorCode::kDecompose, "AC order broken: prior on covered variable");
      }
    } else if (const auto* m = std::get_if<PriorPoint2>(&f.model)) {
      e.step = Step::kPriorPoint;
      e.new_var = f.var_ids[0];
      e.known_var = -1;
      e.chol2 = lower_chol2(m->cov);
      width = 2;
      if (covered[e.new_var]) {
        throw Error(ErrorCode::kDecompose, "AC order broken: prior on covered variable");
      }
    } else if (const auto* m = std::get_if<OdometryPose2>(&f.model)) {
      const bool first_new = !covered[f.var_ids[0]];
      const bool second_new = !covered[f.var_ids[1]];
      if (first_new == second_new) {
        throw Error(ErrorCode::kDecompose, "AC order broken: odometry needs one new endpoint");
      }
      e.step = Step::kOdometry;
      e.new_is_second = second_new;
      e.new_var = second_new ? f.var_ids[1] : f.var_ids[0];
      e.known_var = second_new ? f.var_ids[0] : f.var_ids[1];
      e.chol3 = lower_chol3(m->cov);
      width = 3;
    } else if (std::holds_alternative<Range>(f.model)) {
      const bool first_new = !covered[f.var_ids[0]];
      const bool second_new = !covered[f.var_ids[1]];
      if (first_new == second_new) {
        throw Error(ErrorCode::kDecompose, "AC order broken: range needs one new endpoint");
      }
      e.step = Step::kRange;
      e.new_var = second_new ? f.var_ids[1] : f.var_ids[0];
      e.known_var = second_new ? f.var_ids[0] : f.var_ids[1];
      if (g.variables()[e.new_var].kind != VarKind::kPoint2) {
        throw Error(ErrorCode::kValidation,
                    "a range factor in the acyclic set cannot introduce a pose variable ('" +
                        g.variables()[e.new_var].name + "')");
      }
      width = 2;
    } else {
      throw Error(ErrorCode::kDecompose, "multi-candidate factor cannot be in the AC set");
    }

    covered[e.new_var] = 1;
    layout.entries_.push_back(e);
    layout.segments_.push_back({id, offset, width});
    offset += width;
  }

  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (!covered[i]) {
      throw Error(ErrorCode::kDecompose,
                  "AC set does not span variable '" + g.variables()[i].name + "'");
    }
  }
  layout.dim_ = offset;
  return layout;
}

PriorSample PriorLayout::transform(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim_) {
    throw Error(ErrorCode::kInvalidArgument, "hypercube vector has wrong dimension");
  }
  for (double v : u) {
    if (!(v > 0.0 && v < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "hypercube coordinate outside (0, 1)");
    }
  }

  PriorSample out;
  out.assignment = Assignment(graph_->variables().size());
  Assignment& a = out.assignment;

  for (const Entry& e : entries_) {
    const Factor& f = graph_->factor(e.factor_id);
    const double* s = u.data() + e.offset;
    switch (e.step) {
      case Step::kPriorPose: {
        const auto& m = std::get<PriorPose2>(f.model);
        const Eigen::Vector3d z(standard_normal_quantile(s[0]), standard_normal_quantile(s[1]),
                                standard_normal_quantile(s[2]));
        const Eigen::Vector3d xi = e.chol3 * z;
        a.set(e.new_var, se2_compose(m.mean, se2_exp({xi[0], xi[1], xi[2]})));
        break;
      }
      case Step::kPriorPoint: {
        const auto& m = std::get<PriorPoint2>(f.model);
        const Eigen::Vector2d z(standard_normal_quantile(s[0]), standard_normal_quantile(s[1]));
        const Eigen::Vector2d p = m.mean.vec() + e.chol2 * z;
        a.set(e.new_var, Point2{p[0], p[1]});
        break;
      }
      case Step::kOdometry: {
        const auto& m = std::get<OdometryPose2>(f.model);
        const Eigen::Vector3d z(standard_normal_quantile(s[0]), standard_normal_quantile(s[1]),
                                standard_normal_quantile(s[2]));
        const Eigen::Vector3d xi = e.chol3 * z;
        const Pose2 noisy = se2_compose(m.rel, se2_exp({xi[0], xi[1], xi[2]}));
        const Pose2& known = a.pose(e.known_var);
        a.set(e.new_var, e.new_is_second ? se2_compose(known, noisy)
                                         : se2_compose(known, se2_inverse(noisy)));
        break;
      }
      case Step::kRange: {
        const auto& m = std::get<Range>(f.model);
        const double r = std::max(gaussian_quantile(s[0], m.z, m.sigma), kRadiusFloor);
        const double phi = kTwoPi * s[1];
        const Eigen::Vector2d t = a.translation(e.known_var);
        a.set(e.new_var, Point2{t[0] + r * std::cos(phi), t[1] + r * std::sin(phi)});
        out.log_correction += std::log(r);
        break;
      }
    }
  }
  return out;
}

double PriorLayout::log_density(const Assignment& a) const {
  double total = 0.0;
  for (const Entry& e : entries_) {
    total += graph_->factor_log_density(e.factor_id, a);
    if (e.step == Step::kRange) {
      const double sep = (a.translation(e.new_var) - a.translation(e.known_var)).norm();
      total -= std::log(kTwoPi) + std::log(std::max(sep, kRadiusFloor));
    }
  }
  return total;
}

}  // namespace nfg

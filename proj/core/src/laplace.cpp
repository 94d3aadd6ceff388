#include "nfg/laplace.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "nfg/errors.hpp"
#include "nfg/random.hpp"

namespace nfg {

namespace {

// V(t)^-1 = [[h, t/2], [-t/2, h]] with h = (t/2) cot(t/2), and dh/dt.
void log_inverse_terms(double t, double& h, double& dh) {
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    h = 1.0 - t2 / 12.0 - t2 * t2 / 720.0;
    dh = -t / 6.0 - t2 * t / 180.0;
  } else {
    const double half = 0.5 * t;
    const double cot = std::cos(half) / std::sin(half);
    h = half * cot;
    // csc^2 = 1 + cot^2
    dh = 0.5 * cot - 0.25 * t * (1.0 + cot * cot);
  }
}

// d Log(M exp(delta)) / d delta at delta = 0.
Eigen::Matrix3d dlog_right(const Pose2& m) {
  double h, dh;
  log_inverse_terms(m.theta, h, dh);
  Eigen::Matrix2d w;
  w << h, 0.5 * m.theta, -0.5 * m.theta, h;
  Eigen::Matrix2d dw;
  dw << dh, 0.5, -0.5, dh;

  Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
  j.topLeftCorner<2, 2>() = w * m.rotation();
  j.topRightCorner<2, 1>() = dw * m.translation();
  j(2, 2) = 1.0;
  return j;
}

// Adjoint of SE(2): maps right perturbations across a group element.
Eigen::Matrix3d adjoint(const Pose2& g) {
  Eigen::Matrix3d ad = Eigen::Matrix3d::Zero();
  ad.topLeftCorner<2, 2>() = g.rotation();
  ad(0, 2) = g.y;
  ad(1, 2) = -g.x;
  ad(2, 2) = 1.0;
  return ad;
}

// d translation / d tangent perturbation for a pose variable.
Eigen::Matrix<double, 2, 3> dtranslation(const Pose2& p) {
  Eigen::Matrix<double, 2, 3> d = Eigen::Matrix<double, 2, 3>::Zero();
  d.leftCols<2>() = p.rotation();
  return d;
}

template <int N>
Eigen::Matrix<double, N, N> sqrt_information(const Eigen::Matrix<double, N, N>& cov) {
  Eigen::LLT<Eigen::Matrix<double, N, N>> llt(cov);
  Eigen::Matrix<double, N, N> l = llt.matrixL();
  return l.template triangularView<Eigen::Lower>().solve(
      Eigen::Matrix<double, N, N>::Identity());
}

// Unwhitened range residual row(s): d(z - ||ta - tb||)/d(var tangent).
void range_jacobians(const FactorGraph& g, const Assignment& a, int ia, int ib,
                     double& residual, Eigen::RowVectorXd& ja, Eigen::RowVectorXd& jb,
                     double z) {
  const Eigen::Vector2d ta = a.translation(ia);
  const Eigen::Vector2d tb = a.translation(ib);
  Eigen::Vector2d d = ta - tb;
  double sep = d.norm();
  if (sep < 1e-12) {
    d = Eigen::Vector2d(1.0, 0.0);
    sep = 1e-12;
  }
  const Eigen::RowVector2d n = d.transpose() / sep;
  residual = z - sep;

  const bool pose_a = g.variables()[ia].kind == VarKind::kPose2;
  const bool pose_b = g.variables()[ib].kind == VarKind::kPose2;
  if (pose_a) {
    ja = -n * dtranslation(a.pose(ia));
  } else {
    ja = -n;
  }
  if (pose_b) {
    jb = n * dtranslation(a.pose(ib));
  } else {
    jb = n;
  }
}

}  // namespace

TangentLayout TangentLayout::build(const FactorGraph& g) {
  TangentLayout layout;
  layout.offsets.reserve(g.variables().size());
  for (const auto& v : g.variables()) {
    layout.offsets.push_back(layout.dim);
    layout.dim += var_dim(v.kind);
  }
  return layout;
}

Assignment retract(const FactorGraph& g, const Assignment& a, const Eigen::VectorXd& delta) {
  Assignment out(a.size());
  int off = 0;
  for (std::size_t i = 0; i < g.variables().size(); ++i) {
    const int idx = static_cast<int>(i);
    if (g.variables()[i].kind == VarKind::kPose2) {
      out.set(idx, se2_compose(a.pose(idx), se2_exp({delta[off], delta[off + 1], delta[off + 2]})));
      off += 3;
    } else {
      const Point2& p = a.point(idx);
      out.set(idx, Point2{p.x + delta[off], p.y + delta[off + 1]});
      off += 2;
    }
  }
  return out;
}

FactorLinearization linearize_factor(const FactorGraph& g, int factor_id, const Assignment& a) {
  const Factor& f = g.factor(factor_id);
  FactorLinearization lin;

  if (const auto* m = std::get_if<PriorPose2>(&f.model)) {
    const Pose2 err = se2_between(m->mean, a.pose(f.var_ids[0]));
    const Eigen::Matrix3d w = sqrt_information<3>(m->cov);
    lin.residual = w * se2_log(err).vec();
    lin.jacobians.push_back(w * dlog_right(err));
  } else if (const auto* m = std::get_if<PriorPoint2>(&f.model)) {
    const Eigen::Matrix2d w = sqrt_information<2>(m->cov);
    lin.residual = w * (a.point(f.var_ids[0]).vec() - m->mean.vec());
    lin.jacobians.push_back(w);
  } else if (const auto* m = std::get_if<OdometryPose2>(&f.model)) {
    const Pose2& xi = a.pose(f.var_ids[0]);
    const Pose2& xj = a.pose(f.var_ids[1]);
    const Pose2 between = se2_between(xi, xj);
    const Pose2 err = se2_between(m->rel, between);
    const Eigen::Matrix3d w = sqrt_information<3>(m->cov);
    const Eigen::Matrix3d dlog = dlog_right(err);
    lin.residual = w * se2_log(err).vec();
    lin.jacobians.push_back(-w * dlog * adjoint(se2_inverse(between)));
    lin.jacobians.push_back(w * dlog);
  } else if (const auto* m = std::get_if<Range>(&f.model)) {
    double r;
    Eigen::RowVectorXd ja, jb;
    range_jacobians(g, a, f.var_ids[0], f.var_ids[1], r, ja, jb, m->z);
    const double w = 1.0 / m->sigma;
    lin.residual = Eigen::VectorXd::Constant(1, w * r);
    lin.jacobians.push_back(w * ja);
    lin.jacobians.push_back(w * jb);
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "ambiguous range factors have no single residual; fix the association first");
  }
  return lin;
}

std::vector<Eigen::VectorXd> factor_log_density_gradient(const FactorGraph& g, int factor_id,
                                                         const Assignment& a) {
  const Factor& f = g.factor(factor_id);

  if (const auto* m = std::get_if<AmbiguousRange>(&f.model)) {
    // Softmax-weighted mix of the per-candidate range gradients.
    const std::size_t k = f.var_ids.size() - 1;
    std::vector<double> logdens(k);
    std::vector<double> residuals(k);
    std::vector<Eigen::RowVectorXd> jpose(k), jcand(k);
    double max_term = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      range_jacobians(g, a, f.var_ids[0], f.var_ids[i + 1], residuals[i], jpose[i],
                      jcand[i], m->z);
      logdens[i] = -0.5 * residuals[i] * residuals[i] / (m->sigma * m->sigma);
      max_term = std::max(max_term, logdens[i]);
    }
    double norm = 0.0;
    for (double t : logdens) norm += std::exp(t - max_term);

    std::vector<Eigen::VectorXd> grads;
    grads.reserve(f.var_ids.size());
    for (std::size_t slot = 0; slot < f.var_ids.size(); ++slot) {
      grads.emplace_back(Eigen::VectorXd::Zero(var_dim(g.variables()[f.var_ids[slot]].kind)));
    }
    const double inv_var = 1.0 / (m->sigma * m->sigma);
    for (std::size_t i = 0; i < k; ++i) {
      const double weight = std::exp(logdens[i] - max_term) / norm;
      const double dr = -residuals[i] * inv_var;  // d logdens / d residual
      grads[0] += weight * dr * jpose[i].transpose();
      grads[i + 1] += weight * dr * jcand[i].transpose();
    }
    return grads;
  }

  // Residual kinds: grad = -J^T e in whitened form.
  const FactorLinearization lin = linearize_factor(g, factor_id, a);
  std::vector<Eigen::VectorXd> grads;
  grads.reserve(lin.jacobians.size());
  for (const auto& j : lin.jacobians) {
    grads.emplace_back(-j.transpose() * lin.residual);
  }
  return grads;
}

namespace {

double nlls_objective(const FactorGraph& g, const Assignment& a) {
  double f = 0.0;
  for (const auto& factor : g.factors()) {
    const FactorLinearization lin = linearize_factor(g, factor.id, a);
    f += 0.5 * lin.residual.squaredNorm();
  }
  return f;
}

void accumulate_normal_equations(const FactorGraph& g, const TangentLayout& layout,
                                 const Assignment& a, Eigen::MatrixXd& hessian,
                                 Eigen::VectorXd& gradient) {
  hessian.setZero();
  gradient.setZero();
  for (const auto& factor : g.factors()) {
    const FactorLinearization lin = linearize_factor(g, factor.id, a);
    for (std::size_t bi = 0; bi < factor.var_ids.size(); ++bi) {
      const int oi = layout.offsets[factor.var_ids[bi]];
      const auto& ji = lin.jacobians[bi];
      gradient.segment(oi, ji.cols()) += ji.transpose() * lin.residual;
      for (std::size_t bj = 0; bj < factor.var_ids.size(); ++bj) {
        const int oj = layout.offsets[factor.var_ids[bj]];
        const auto& jj = lin.jacobians[bj];
        hessian.block(oi, oj, ji.cols(), jj.cols()) += ji.transpose() * jj;
      }
    }
  }
}

}  // namespace

MapResult gauss_newton_map(const FactorGraph& g, const Assignment& init, int max_iters,
                           double tol) {
  for (const auto& f : g.factors()) {
    if (f.is_ambiguous()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "graph contains ambiguous associations; enumerate hypotheses instead");
    }
  }
  if (init.size() != g.variables().size()) {
    throw Error(ErrorCode::kInvalidArgument, "initial assignment does not cover the graph");
  }

  const TangentLayout layout = TangentLayout::build(g);
  MapResult result;
  result.assignment = init;
  result.info = Eigen::MatrixXd::Zero(layout.dim, layout.dim);

  Eigen::MatrixXd hessian(layout.dim, layout.dim);
  Eigen::VectorXd gradient(layout.dim);
  double objective = nlls_objective(g, result.assignment);

  for (int iter = 1; iter <= max_iters; ++iter) {
    result.iterations = iter;
    accumulate_normal_equations(g, layout, result.assignment, hessian, gradient);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(hessian);
    if (!lu.isInvertible()) {
      result.failure = "singular normal equations: the graph is under-determined";
      return result;
    }
    const Eigen::VectorXd delta = lu.solve(-gradient);

    if (delta.lpNorm<Eigen::Infinity>() < tol) {
      result.converged = true;
      break;
    }

    double alpha = 1.0;
    bool improved = false;
    for (int backoff = 0; backoff <= 10; ++backoff) {
      const Assignment trial = retract(g, result.assignment, alpha * delta);
      const double trial_objective = nlls_objective(g, trial);
      if (trial_objective <= objective) {
        result.assignment = trial;
        objective = trial_objective;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) {
      result.failure = "step halving could not decrease the objective";
      return result;
    }
  }
  if (!result.converged && result.failure.empty()) {
    result.failure = "no convergence within the iteration limit";
  }

  accumulate_normal_equations(g, layout, result.assignment, hessian, gradient);
  result.info = hessian;
  return result;
}

std::vector<Assignment> laplace_samples(const FactorGraph& g, const MapResult& m, std::size_t n,
                                        std::uint64_t seed) {
  if (!m.converged) {
    throw Error(ErrorCode::kConvergence, "laplace_samples requires a converged MAP result");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m.info);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kConvergence, "information matrix is not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();

  Rng rng(derive_seed(seed, 0x1a91));
  std::vector<Assignment> out;
  out.reserve(n);
  Eigen::VectorXd z(m.info.rows());
  for (std::size_t i = 0; i < n; ++i) {
    for (long k = 0; k < z.size(); ++k) z[k] = rng.normal();
    // delta = L^-T z has covariance (L L^T)^-1 = info^-1.
    const Eigen::VectorXd delta =
        l.transpose().triangularView<Eigen::Upper>().solve(z);
    out.push_back(retract(g, m.assignment, delta));
  }
  return out;
}

}  // namespace nfg

#ifndef NFG_GEOM_HPP
#define NFG_GEOM_HPP

#include <Eigen/Core>

namespace nfg {

// Wraps an angle into the canonical branch (-pi, pi].
double wrap_angle(double theta);

// Planar rigid transform. theta is kept in (-pi, pi] by every constructor
// and operation.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2() = default;
  Pose2(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  Eigen::Vector2d translation() const { return {x, y}; }
  Eigen::Matrix2d rotation() const;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Eigen::Vector2d vec() const { return {x, y}; }
};

// Lie-algebra coordinates of a Pose2 perturbation: (vx, vy) drive the
// translation part, omega the rotation.
struct TangentVec3 {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;

  Eigen::Vector3d vec() const { return {vx, vy, omega}; }
};

// Closed-form exponential map. The rotation block V(omega) switches to a
// series expansion below |omega| = 1e-6 to avoid cancellation.
Pose2 se2_exp(const TangentVec3& xi);

// Inverse of se2_exp on the canonical branch: se2_exp(se2_log(p)) == p.
TangentVec3 se2_log(const Pose2& p);

Pose2 se2_inverse(const Pose2& p);
Pose2 se2_compose(const Pose2& a, const Pose2& b);

// between(a, b) = a^-1 * b, so compose(a, between(a, b)) == b.
Pose2 se2_between(const Pose2& a, const Pose2& b);

// Quantile of the standard normal distribution, accurate to better than
// 1e-9 absolute over (0, 1). Throws Error(kInvalidArgument) outside (0, 1).
double standard_normal_quantile(double u);

// mu + sigma * Phi^-1(u). Requires u in (0, 1) and sigma > 0.
double gaussian_quantile(double u, double mu, double sigma);

}  // namespace nfg

#endif  // NFG_GEOM_HPP

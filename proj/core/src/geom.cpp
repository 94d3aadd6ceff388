#include "nfg/geom.hpp"

#include <cmath>

#include "nfg/errors.hpp"

namespace nfg {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Below this magnitude the V(theta) entries use their series expansions.
constexpr double kSmallAngle = 1e-6;

// V(theta) entries: a = sin(t)/t, b = (1 - cos(t))/t.
void sinc_terms(double t, double& a, double& b) {
  if (std::abs(t) < kSmallAngle) {
    const double t2 = t * t;
    a = 1.0 - t2 / 6.0;
    b = t / 2.0 - t2 * t / 24.0;
  } else {
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t;
  }
}

}  // namespace

double wrap_angle(double theta) {
  double t = std::fmod(theta + kPi, 2.0 * kPi);
  if (t <= 0.0) t += 2.0 * kPi;
  return t - kPi;
}

Eigen::Matrix2d Pose2::rotation() const {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Pose2 se2_exp(const TangentVec3& xi) {
  double a, b;
  sinc_terms(xi.omega, a, b);
  return Pose2(a * xi.vx - b * xi.vy, b * xi.vx + a * xi.vy, xi.omega);
}

TangentVec3 se2_log(const Pose2& p) {
  double a, b;
  sinc_terms(p.theta, a, b);
  const double q = a * a + b * b;  // det V = (2 - 2 cos t) / t^2
  const double vx = (a * p.x + b * p.y) / q;
  const double vy = (-b * p.x + a * p.y) / q;
  return TangentVec3{vx, vy, p.theta};
}

Pose2 se2_inverse(const Pose2& p) {
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  return Pose2(-(c * p.x + s * p.y), -(-s * p.x + c * p.y), -p.theta);
}

Pose2 se2_compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta), s = std::sin(a.theta);
  return Pose2(a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, a.theta + b.theta);
}

Pose2 se2_between(const Pose2& a, const Pose2& b) {
  return se2_compose(se2_inverse(a), b);
}

namespace {

// Central region rational approximation of Phi^-1 (Acklam), polished with
// one Halley step on erfc so the result is accurate to near machine
// precision everywhere in (0, 1).
double acklam_quantile(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement: e = Phi(x) - p via erfc, stable in both tails.
  const double sqrt2 = 1.4142135623730951;
  const double sqrt_2pi = 2.5066282746310002;
  const double e = 0.5 * std::erfc(-x / sqrt2) - p;
  const double u = e * sqrt_2pi * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

double standard_normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "quantile argument must lie in the open interval (0, 1)");
  }
  if (u == 0.5) return 0.0;
  return acklam_quantile(u);
}

double gaussian_quantile(double u, double mu, double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gaussian_quantile requires sigma > 0");
  }
  return mu + sigma * standard_normal_quantile(u);
}

}  // namespace nfg

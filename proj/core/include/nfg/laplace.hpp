#ifndef NFG_LAPLACE_HPP
#define NFG_LAPLACE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nfg/graph.hpp"

namespace nfg {

// Stacking of per-variable tangent blocks (3 per pose, 2 per point) in
// declaration order.
struct TangentLayout {
  std::vector<int> offsets;
  int dim = 0;

  static TangentLayout build(const FactorGraph& g);
};

// Applies a stacked tangent perturbation: poses retract through the
// exponential map, points additively.
Assignment retract(const FactorGraph& g, const Assignment& a, const Eigen::VectorXd& delta);

// Whitened residual and per-variable Jacobian blocks of one factor.
// Jacobians are taken with respect to the retraction perturbation of each
// variable. AmbiguousRange factors have no residual form and are rejected.
struct FactorLinearization {
  Eigen::VectorXd residual;
  std::vector<Eigen::MatrixXd> jacobians;
};
FactorLinearization linearize_factor(const FactorGraph& g, int factor_id, const Assignment& a);

// Gradient of factor_log_density with respect to each variable's tangent
// perturbation. Defined for every factor kind, including AmbiguousRange.
std::vector<Eigen::VectorXd> factor_log_density_gradient(const FactorGraph& g, int factor_id,
                                                         const Assignment& a);

struct MapResult {
  Assignment assignment;
  Eigen::MatrixXd info;  // J^T Lambda J over the tangent stacking, at the MAP
  bool converged = false;
  int iterations = 0;
  std::string failure;
};

// Tangent-space Gauss-Newton with step halving (max 10 halvings per step).
// Fails flagged (not thrown) on singular normal equations or a stalled line
// search. Ambiguous graphs are rejected up front.
MapResult gauss_newton_map(const FactorGraph& g, const Assignment& init, int max_iters = 100,
                           double tol = 1e-9);

// Draws from the Gaussian with covariance info^-1 centered at the MAP.
// Requires a converged result with positive-definite information.
std::vector<Assignment> laplace_samples(const FactorGraph& g, const MapResult& m, std::size_t n,
                                        std::uint64_t seed);

}  // namespace nfg

#endif  // NFG_LAPLACE_HPP

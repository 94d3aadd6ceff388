#ifndef NFG_METRICS_HPP
#define NFG_METRICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nfg/nested.hpp"

namespace nfg {

// Rows of flattened assignments with per-column labels ("x0.x", "x0.theta",
// ...). Columns whose label ends in ".theta" hold raw radians and get
// circular treatment throughout. logw holds the (normalized) log weight per
// row; equal-weight sets use -ln(n).
struct SampleMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd rows;
  std::vector<double> logw;

  std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
};

bool is_angle_label(const std::string& label);

// Weighted dead points of a graph solve as a SampleMatrix.
SampleMatrix to_sample_matrix(const GraphSolveResult& result);

// Equal-weight systematic resample down/up to n rows.
SampleMatrix resample_matrix(const SampleMatrix& samples, std::size_t n, std::uint64_t seed);

// Column-wise mean: arithmetic for linear columns, circular for angle
// columns. Throws when an angle column's resultant vanishes (no meaningful
// mean direction).
Eigen::VectorXd sample_mean(const SampleMatrix& samples);

// sqrt(sum delta_k^2 / d) with wrapped differences on angle columns.
double rmse(const Eigen::VectorXd& mean, const Eigen::VectorXd& reference,
            const std::vector<std::string>& labels);

// Biased (V-statistic) RBF maximum mean discrepancy between two sample sets
// with identical labels. Angle columns enter the kernel as (cos, sin) pairs.
// The bandwidth is the median pairwise squared distance of the pooled set
// unless an explicit squared length scale is passed.
struct MmdDetail {
  double mmd = 0.0;
  double bandwidth_sq = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};
MmdDetail mmd(const SampleMatrix& a, const SampleMatrix& b);
MmdDetail mmd(const SampleMatrix& a, const SampleMatrix& b, double bandwidth_sq);

}  // namespace nfg

#endif  // NFG_METRICS_HPP

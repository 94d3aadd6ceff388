#ifndef NFG_PRIOR_TRANSFORM_HPP
#define NFG_PRIOR_TRANSFORM_HPP

#include <span>
#include <vector>

#include <Eigen/Core>

#include "nfg/decompose.hpp"
#include "nfg/graph.hpp"

namespace nfg {

// Assignment drawn through the ancestral prior, plus the log of the polar
// Jacobian accumulated over AC range factors (sum of ln ||l - t||). The
// likelihood adds this term back so the sampled product matches the full
// factor product.
struct PriorSample {
  Assignment assignment;
  double log_correction = 0.0;
};

// Maps the unit hypercube onto assignments by walking the AC factors in
// order and inverting each conditional through its Gaussian quantile.
// Hypercube segment widths: pose factors 3, point priors 2, ranges 2
// (radial quantile + angle).
class PriorLayout {
 public:
  static PriorLayout build(const FactorGraph& g, const Decomposition& d);

  int dim() const { return dim_; }

  // Per-factor hypercube segment (offset, width); entries follow AC order.
  struct Segment {
    int factor_id;
    int offset;
    int width;
  };
  const std::vector<Segment>& segments() const { return segments_; }

  // Deterministic, total on the open cube. Throws Error(kInvalidArgument)
  // if u has the wrong size or leaves (0, 1).
  PriorSample transform(std::span<const double> u) const;

  // Log density of the ancestral prior at an arbitrary assignment (pose
  // blocks measured in tangent coordinates). Satisfies
  //   prior_log_density + log_likelihood == total_log_density.
  double log_density(const Assignment& a) const;

 private:
  enum class Step { kPriorPose, kPriorPoint, kOdometry, kRange };

  struct Entry {
    Step step;
    int factor_id;
    int offset;
    int new_var;
    int known_var;       // -1 for priors
    bool new_is_second;  // odometry: the new variable is vars[1]
    Eigen::Matrix3d chol3;
    Eigen::Matrix2d chol2;
  };

  const FactorGraph* graph_ = nullptr;
  std::vector<Entry> entries_;
  std::vector<Segment> segments_;
  int dim_ = 0;
};

}  // namespace nfg

#endif  // NFG_PRIOR_TRANSFORM_HPP

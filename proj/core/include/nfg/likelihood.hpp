#ifndef NFG_LIKELIHOOD_HPP
#define NFG_LIKELIHOOD_HPP

#include <vector>

#include "nfg/decompose.hpp"
#include "nfg/graph.hpp"

namespace nfg {

// Factor ids contributing to the sampling likelihood: the loop-closing set
// plus the AC range factors whose polar Jacobian must be restored.
struct LikelihoodSpec {
  std::vector<int> lc_factors;
  std::vector<int> ac_range_factors;

  static LikelihoodSpec build(const FactorGraph& g, const Decomposition& d);
};

// Smallest value log_likelihood returns; keeps the likelihood ordering total
// when a residual overflows.
inline constexpr double kLogLikelihoodFloor = -1e300;

// Sum of loop-closing log densities plus, per AC range factor,
// ln(2 pi) + ln ||l - t|| evaluated at the assignment.
double log_likelihood(const FactorGraph& g, const LikelihoodSpec& spec, const Assignment& a);

}  // namespace nfg

#endif  // NFG_LIKELIHOOD_HPP

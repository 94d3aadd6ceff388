#include "nfg/likelihood.hpp"

#include <cmath>

namespace nfg {

LikelihoodSpec LikelihoodSpec::build(const FactorGraph& g, const Decomposition& d) {
  LikelihoodSpec spec;
  spec.lc_factors = d.lc;
  for (int id : d.ac) {
    if (std::holds_alternative<Range>(g.factor(id).model)) {
      spec.ac_range_factors.push_back(id);
    }
  }
  return spec;
}

double log_likelihood(const FactorGraph& g, const LikelihoodSpec& spec, const Assignment& a) {
  constexpr double kLog2Pi = 1.8378770664093453;
  double total = 0.0;
  for (int id : spec.lc_factors) total += g.factor_log_density(id, a);
  for (int id : spec.ac_range_factors) {
    const Factor& f = g.factor(id);
    const double sep = (a.translation(f.var_ids[0]) - a.translation(f.var_ids[1])).norm();
    total += kLog2Pi + std::log(sep);
  }
  if (std::isnan(total) || total < kLogLikelihoodFloor) return kLogLikelihoodFloor;
  return total;
}

}  // namespace nfg

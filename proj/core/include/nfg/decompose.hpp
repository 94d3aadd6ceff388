#ifndef NFG_DECOMPOSE_HPP
#define NFG_DECOMPOSE_HPP

#include <vector>

#include "nfg/graph.hpp"

namespace nfg {

// Partition of factor ids into an acyclic spanning set and the loop-closing
// remainder. AC order is the ancestral-sampling order: each AC factor, when
// reached, introduces at most one new variable.
struct Decomposition {
  std::vector<int> ac;
  std::vector<int> lc;
};

// Splits a graph by replaying FIFO queues over the factors in insertion
// order: priors seed AC and its covered-variable set; factors over more than
// two variables always go to LC; a factor whose endpoints are all covered is
// loop-closing; one covered endpoint extends AC; none covered is re-queued.
//
// Throws Error(kValidation) when no prior anchors the graph and
// Error(kDecompose) naming the orphaned variables when the queue stalls.
Decomposition decompose(const FactorGraph& g);

}  // namespace nfg

#endif  // NFG_DECOMPOSE_HPP

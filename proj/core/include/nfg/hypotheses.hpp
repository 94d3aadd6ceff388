#ifndef NFG_HYPOTHESES_HPP
#define NFG_HYPOTHESES_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nfg/graph.hpp"
#include "nfg/nested.hpp"

namespace nfg {

// One fixed data association: every ambiguous range factor replaced by a
// plain range to its chosen candidate.
struct Hypothesis {
  // (ambiguous factor id, candidate slot) per ambiguous factor, in factor
  // id order.
  std::vector<std::pair<int, int>> choices;
  FactorGraph graph;

  // Stable key like "f3:l0;f7:l1" for tables and file names.
  std::string key() const;
};

// Cartesian product over candidate choices, lexicographic in (factor id,
// candidate index). Requires at least one ambiguous factor; refuses more
// than 4096 combinations.
std::vector<Hypothesis> enumerate_hypotheses(const FactorGraph& g);

// Softmax of per-hypothesis log evidences (uniform association prior).
std::vector<double> hypothesis_weights(const std::vector<double>& logzs);

struct HypothesisSet {
  std::vector<Hypothesis> hypotheses;
  std::vector<double> logzs;
  std::vector<double> weights;
  std::vector<GraphSolveResult> runs;
};

// Decomposes and solves every hypothesis graph with the shared config;
// per-hypothesis seeds derive from config.seed. jobs > 1 runs hypotheses
// concurrently (results are ordered and seed-reproducible either way).
HypothesisSet solve_hypotheses(const FactorGraph& g, const NSConfig& config, int jobs = 1);

// Evidence-weighted mixture of per-hypothesis posteriors: n draws allocated
// by systematic resampling over the weights, then equal-weight resampling
// within each hypothesis.
std::vector<Assignment> mix_posteriors(const FactorGraph& g,
                                       const std::vector<GraphSolveResult>& runs,
                                       const std::vector<double>& weights, std::size_t n,
                                       std::uint64_t seed);

}  // namespace nfg

#endif  // NFG_HYPOTHESES_HPP

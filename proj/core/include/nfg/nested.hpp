#ifndef NFG_NESTED_HPP
#define NFG_NESTED_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nfg/decompose.hpp"
#include "nfg/graph.hpp"

namespace nfg {

struct NSConfig {
  int n_live = 500;
  int walk_steps = 25;
  double dlogz = 0.1;
  long max_iters = 200000;
  std::uint64_t seed = 0;
};

// Maps a unit-cube point to the sampling coordinates.
using PriorTransformFn = std::function<std::vector<double>(std::span<const double>)>;
// Log likelihood evaluated at transformed coordinates.
using LogLikelihoodFn = std::function<double(std::span<const double>)>;

struct DeadPoint {
  std::vector<double> params;
  double logl = 0.0;
  // Unnormalized log posterior weight, logl + ln(dX). By construction
  // logsumexp over all dead points equals logz.
  double logw = 0.0;
};

struct NSResult {
  std::vector<DeadPoint> dead;
  double logz = 0.0;
  double logz_err = 0.0;  // sqrt(H / n_live)
  double h = 0.0;         // information in nats
  long n_calls = 0;
  long n_iters = 0;
  bool converged = false;
  bool plateau = false;
  std::string diagnostic;

  // logw - logz per dead point; exp of these sums to one.
  std::vector<double> normalized_logw() const;
};

// Static nested sampling: live points on the unit cube, deterministic
// shrinkage ln X_i = -i / n_live, trapezoid evidence accumulation, and
// likelihood-constrained random-walk replacement. Reproducible for a fixed
// seed; replacement walks draw from per-iteration streams.
NSResult nested_sample(int dim, const PriorTransformFn& prior, const LogLikelihoodFn& loglike,
                       const NSConfig& config);

// Systematic resampling of dead-point indices proportional to exp(logw).
std::vector<std::size_t> systematic_resample(const std::vector<double>& logw, std::size_t n,
                                             std::uint64_t seed);

// Kish effective sample size of the weighted dead points.
double effective_sample_size(const NSResult& result);

// Nested sampling over a decomposed factor graph: the AC set becomes the
// prior transform, the LC set (plus AC range corrections) the likelihood.
// Dead-point params are flattened assignments in coordinate_labels() order.
struct GraphSolveResult {
  NSResult ns;
  std::vector<std::string> labels;
};

GraphSolveResult solve_graph(const FactorGraph& g, const Decomposition& d,
                             const NSConfig& config);

// Equal-weight posterior draws from a graph solve.
std::vector<Assignment> resample_assignments(const FactorGraph& g, const NSResult& result,
                                             std::size_t n, std::uint64_t seed);

}  // namespace nfg

#endif  // NFG_NESTED_HPP

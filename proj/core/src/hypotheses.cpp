#include "nfg/hypotheses.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "nfg/decompose.hpp"
#include "nfg/errors.hpp"
#include "nfg/random.hpp"

namespace nfg {

namespace {

constexpr std::size_t kMaxHypotheses = 4096;

std::vector<int> ambiguous_factor_ids(const FactorGraph& g) {
  std::vector<int> ids;
  for (const auto& f : g.factors()) {
    if (f.is_ambiguous()) ids.push_back(f.id);
  }
  return ids;
}

}  // namespace

std::string Hypothesis::key() const {
  std::string key;
  for (const auto& choice : choices) {
    if (!key.empty()) key += ';';
    // The replaced factor's second variable is the chosen candidate.
    key += 'f' + std::to_string(choice.first) + ':' + graph.factor(choice.first).vars[1];
  }
  return key;
}

std::vector<Hypothesis> enumerate_hypotheses(const FactorGraph& g) {
  const std::vector<int> amb = ambiguous_factor_ids(g);
  if (amb.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "graph has no ambiguous range factors");
  }

  std::size_t count = 1;
  for (int id : amb) {
    const std::size_t k = g.factor(id).vars.size() - 1;
    if (count > kMaxHypotheses / k) {
      count = kMaxHypotheses + 1;
      break;
    }
    count *= k;
  }
  if (count > kMaxHypotheses) {
    throw Error(ErrorCode::kOverflow,
                "hypothesis enumeration would exceed " + std::to_string(kMaxHypotheses) +
                    " combinations");
  }

  std::vector<Hypothesis> out;
  out.reserve(count);
  std::vector<int> slots(amb.size(), 0);
  while (true) {
    Hypothesis h;
    FactorGraph current = g;
    for (std::size_t i = 0; i < amb.size(); ++i) {
      const Factor& f = g.factor(amb[i]);
      const auto& m = std::get<AmbiguousRange>(f.model);
      const std::string& pose = f.vars[0];
      const std::string& cand = f.vars[static_cast<std::size_t>(slots[i]) + 1];
      current = replace_factor(current, amb[i], {pose, cand}, Range{m.z, m.sigma});
      h.choices.emplace_back(amb[i], slots[i]);
    }
    h.graph = std::move(current);
    out.push_back(std::move(h));

    // Mixed-radix increment, last factor fastest: lexicographic order.
    int pos = static_cast<int>(amb.size()) - 1;
    while (pos >= 0) {
      const int k = static_cast<int>(g.factor(amb[static_cast<std::size_t>(pos)]).vars.size()) - 1;
      if (++slots[static_cast<std::size_t>(pos)] < k) break;
      slots[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

std::vector<double> hypothesis_weights(const std::vector<double>& logzs) {
  if (logzs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "hypothesis_weights needs at least one evidence");
  }
  double m = logzs[0];
  for (double v : logzs) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "hypothesis evidences must be finite");
    }
    m = std::max(m, v);
  }
  std::vector<double> w(logzs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logzs.size(); ++i) {
    w[i] = std::exp(logzs[i] - m);
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

HypothesisSet solve_hypotheses(const FactorGraph& g, const NSConfig& config, int jobs) {
  HypothesisSet set;
  set.hypotheses = enumerate_hypotheses(g);
  set.runs.resize(set.hypotheses.size());
  set.logzs.resize(set.hypotheses.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= set.hypotheses.size()) break;
      NSConfig c = config;
      c.seed = derive_seed(config.seed, 0x8000 + i);
      const Decomposition d = decompose(set.hypotheses[i].graph);
      set.runs[i] = solve_graph(set.hypotheses[i].graph, d, c);
      set.logzs[i] = set.runs[i].ns.logz;
    }
  };

  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(set.hypotheses.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  set.weights = hypothesis_weights(set.logzs);
  return set;
}

std::vector<Assignment> mix_posteriors(const FactorGraph& g,
                                       const std::vector<GraphSolveResult>& runs,
                                       const std::vector<double>& weights, std::size_t n,
                                       std::uint64_t seed) {
  if (runs.size() != weights.size() || runs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mix_posteriors needs matching runs and weights");
  }
  std::vector<double> logw(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    logw[i] = weights[i] > 0.0 ? std::log(weights[i]) : -1e300;
  }
  const auto allocation = systematic_resample(logw, n, derive_seed(seed, 0x31));

  std::vector<Assignment> out;
  out.reserve(n);
  std::size_t start = 0;
  while (start < allocation.size()) {
    std::size_t end = start;
    while (end < allocation.size() && allocation[end] == allocation[start]) ++end;
    const std::size_t hyp = allocation[start];
    const auto draws = resample_assignments(g, runs[hyp].ns, end - start,
                                            derive_seed(seed, 0x8100 + hyp));
    out.insert(out.end(), draws.begin(), draws.end());
    start = end;
  }
  return out;
}

}  // namespace nfg

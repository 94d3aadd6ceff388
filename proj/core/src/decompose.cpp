#include "nfg/decompose.hpp"

#include <deque>

#include "nfg/errors.hpp"

namespace nfg {

Decomposition decompose(const FactorGraph& g) {
  g.validate();

  Decomposition d;
  std::vector<char> covered(g.variables().size(), 0);
  std::deque<int> queue;

  for (const auto& f : g.factors()) {
    if (f.is_prior()) {
      // A second prior on an already covered variable would close a cycle.
      const int v = f.var_ids[0];
      if (covered[v]) {
        d.lc.push_back(f.id);
      } else {
        d.ac.push_back(f.id);
        covered[v] = 1;
      }
    } else {
      queue.push_back(f.id);
    }
  }

  // If a whole pass over the queue moves nothing, the remainder cannot reach
  // the covered set through <=2-ary factors.
  std::size_t stalled = 0;
  while (!queue.empty()) {
    if (stalled == queue.size()) {
      std::string orphans;
      for (std::size_t i = 0; i < covered.size(); ++i) {
        if (!covered[i]) orphans += ' ' + g.variables()[i].name;
      }
      throw Error(ErrorCode::kDecompose,
                  "graph is not connected through <=2-ary factors; unreachable variables:" +
                      orphans);
    }
    const int id = queue.front();
    queue.pop_front();
    const Factor& f = g.factor(id);

    if (f.var_ids.size() > 2) {
      d.lc.push_back(id);
      stalled = 0;
      continue;
    }
    int n_covered = 0;
    for (int v : f.var_ids) n_covered += covered[v];
    if (n_covered == static_cast<int>(f.var_ids.size())) {
      d.lc.push_back(id);
      stalled = 0;
    } else if (n_covered == 1) {
      d.ac.push_back(id);
      for (int v : f.var_ids) covered[v] = 1;
      stalled = 0;
    } else {
      queue.push_back(id);
      ++stalled;
    }
  }

  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (!covered[i]) {
      throw Error(ErrorCode::kDecompose,
                  "variable '" + g.variables()[i].name + "' is not reached by any factor");
    }
  }
  return d;
}

}  // namespace nfg

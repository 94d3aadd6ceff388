#ifndef NFG_GRAPH_IO_HPP
#define NFG_GRAPH_IO_HPP

#include <string>

#include "nfg/graph.hpp"

namespace nfg {

// Shortest decimal representation that parses back to the same double.
// Used by every text emitter so saved files are reproducible byte for byte.
std::string format_double(double v);

// Parses the line-oriented graph format (VAR / PRIOR_POSE2 / PRIOR_POINT2 /
// ODOM_POSE2 / RANGE / AMB_RANGE / TRUTH_*). '#' starts a comment. Throws
// ParseError with the offending line number.
FactorGraph load_graph(const std::string& text);
FactorGraph load_graph_file(const std::string& path);

// Canonical text form: variables in declaration order, factors in insertion
// order, truth records last. load(save(g)) is structurally equal to g and
// save(load(save(g))) is byte-identical.
std::string save_graph(const FactorGraph& g);
void save_graph_file(const FactorGraph& g, const std::string& path);

}  // namespace nfg

#endif  // NFG_GRAPH_IO_HPP

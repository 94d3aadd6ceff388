#ifndef NFG_SAMPLE_IO_HPP
#define NFG_SAMPLE_IO_HPP

#include <string>

#include "nfg/metrics.hpp"

namespace nfg {

// Sample CSV: header "logw,<var>.<comp>,...", one row per draw, shortest
// round-trip float formatting. Columns follow the graph's declaration order.
std::string write_sample_csv(const SampleMatrix& samples);
void write_sample_csv_file(const SampleMatrix& samples, const std::string& path);

SampleMatrix read_sample_csv(const std::string& text);
SampleMatrix read_sample_csv_file(const std::string& path);

}  // namespace nfg

#endif  // NFG_SAMPLE_IO_HPP

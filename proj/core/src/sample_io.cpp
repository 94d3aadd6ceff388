#include "nfg/sample_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "nfg/errors.hpp"
#include "nfg/graph_io.hpp"

namespace nfg {

std::string write_sample_csv(const SampleMatrix& samples) {
  std::ostringstream out;
  out << "logw";
  for (const auto& l : samples.labels) out << ',' << l;
  out << '\n';
  for (long i = 0; i < samples.rows.rows(); ++i) {
    out << format_double(samples.logw[static_cast<std::size_t>(i)]);
    for (long j = 0; j < samples.rows.cols(); ++j) {
      out << ',' << format_double(samples.rows(i, j));
    }
    out << '\n';
  }
  return out.str();
}

void write_sample_csv_file(const SampleMatrix& samples, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out << write_sample_csv(samples);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_field(const std::string& tok, int line) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected a number, got '" + tok + "'");
  }
  return v;
}

}  // namespace

SampleMatrix read_sample_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(1, "empty sample file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv(line);
  if (header.empty() || header[0] != "logw") {
    throw ParseError(1, "sample header must start with 'logw'");
  }

  SampleMatrix s;
  s.labels.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw ParseError(lineno, "row has " + std::to_string(fields.size()) + " fields, expected " +
                                   std::to_string(header.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) row[j] = parse_field(fields[j], lineno);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(lineno, "sample file has no rows");

  s.rows.resize(static_cast<long>(rows.size()), static_cast<long>(s.labels.size()));
  s.logw.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.logw[i] = rows[i][0];
    for (std::size_t j = 0; j < s.labels.size(); ++j) {
      s.rows(static_cast<long>(i), static_cast<long>(j)) = rows[i][j + 1];
    }
  }
  return s;
}

SampleMatrix read_sample_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_sample_csv(buf.str());
}

}  // namespace nfg

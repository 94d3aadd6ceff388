#include "nfg/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "nfg/errors.hpp"

namespace nfg {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

class LineParser {
 public:
  LineParser(int line, std::vector<std::string> tokens)
      : line_(line), tokens_(std::move(tokens)) {}

  std::string word() {
    if (pos_ >= tokens_.size()) {
      throw ParseError(line_, "record is truncated");
    }
    return tokens_[pos_++];
  }

  double number() {
    const std::string tok = word();
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw ParseError(line_, "expected a number, got '" + tok + "'");
    }
    return v;
  }

  long integer() {
    const std::string tok = word();
    long v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw ParseError(line_, "expected an integer, got '" + tok + "'");
    }
    return v;
  }

  void done() {
    if (pos_ != tokens_.size()) {
      throw ParseError(line_, "trailing tokens after record");
    }
  }

  Eigen::Matrix3d cov3() {
    const double c11 = number(), c12 = number(), c13 = number();
    const double c22 = number(), c23 = number(), c33 = number();
    Eigen::Matrix3d c;
    c << c11, c12, c13, c12, c22, c23, c13, c23, c33;
    return c;
  }

  Eigen::Matrix2d cov2() {
    const double c11 = number(), c12 = number(), c22 = number();
    Eigen::Matrix2d c;
    c << c11, c12, c12, c22;
    return c;
  }

 private:
  int line_;
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
};

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') break;
    tokens.push_back(tok);
  }
  return tokens;
}

void require_declared(const FactorGraph& g, const std::string& name, int line) {
  if (!g.has_variable(name)) {
    throw ParseError(line, "undeclared variable '" + name + "'");
  }
}

}  // namespace

FactorGraph load_graph(const std::string& text) {
  FactorGraph g;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    LineParser p(lineno, std::move(tokens));
    const std::string tag = p.word();
    try {
      if (tag == "VAR") {
        const std::string kind = p.word();
        const std::string name = p.word();
        p.done();
        if (kind == "POSE2") {
          g.add_variable(name, VarKind::kPose2);
        } else if (kind == "POINT2") {
          g.add_variable(name, VarKind::kPoint2);
        } else {
          throw ParseError(lineno, "unknown variable kind '" + kind + "'");
        }
      } else if (tag == "PRIOR_POSE2") {
        const std::string v = p.word();
        require_declared(g, v, lineno);
        const double x = p.number(), y = p.number(), th = p.number();
        const Eigen::Matrix3d cov = p.cov3();
        p.done();
        g.add_factor({v}, PriorPose2{Pose2(x, y, th), cov});
      } else if (tag == "PRIOR_POINT2") {
        const std::string v = p.word();
        require_declared(g, v, lineno);
        const double x = p.number(), y = p.number();
        const Eigen::Matrix2d cov = p.cov2();
        p.done();
        g.add_factor({v}, PriorPoint2{Point2{x, y}, cov});
      } else if (tag == "ODOM_POSE2") {
        const std::string from = p.word(), to = p.word();
        require_declared(g, from, lineno);
        require_declared(g, to, lineno);
        const double x = p.number(), y = p.number(), th = p.number();
        const Eigen::Matrix3d cov = p.cov3();
        p.done();
        g.add_factor({from, to}, OdometryPose2{Pose2(x, y, th), cov});
      } else if (tag == "RANGE") {
        const std::string a = p.word(), b = p.word();
        require_declared(g, a, lineno);
        require_declared(g, b, lineno);
        const double z = p.number(), sigma = p.number();
        p.done();
        g.add_factor({a, b}, Range{z, sigma});
      } else if (tag == "AMB_RANGE") {
        const std::string pose = p.word();
        require_declared(g, pose, lineno);
        const double z = p.number(), sigma = p.number();
        const long k = p.integer();
        if (k < 2) throw ParseError(lineno, "AMB_RANGE needs k >= 2 candidates");
        std::vector<std::string> vars{pose};
        for (long i = 0; i < k; ++i) {
          const std::string cand = p.word();
          require_declared(g, cand, lineno);
          vars.push_back(cand);
        }
        p.done();
        g.add_factor(vars, AmbiguousRange{z, sigma});
      } else if (tag == "TRUTH_POSE2") {
        const std::string v = p.word();
        require_declared(g, v, lineno);
        const double x = p.number(), y = p.number(), th = p.number();
        p.done();
        g.set_truth(v, Pose2(x, y, th));
      } else if (tag == "TRUTH_POINT2") {
        const std::string v = p.word();
        require_declared(g, v, lineno);
        const double x = p.number(), y = p.number();
        p.done();
        g.set_truth(v, Point2{x, y});
      } else {
        throw ParseError(lineno, "unknown record tag '" + tag + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      // Graph-level validation (arity, SPD, kinds) reported with the line.
      throw ParseError(lineno, e.what());
    }
  }
  g.validate();
  return g;
}

FactorGraph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_graph(buf.str());
}

namespace {

void emit_cov3(std::ostream& out, const Eigen::Matrix3d& c) {
  out << ' ' << format_double(c(0, 0)) << ' ' << format_double(c(0, 1)) << ' '
      << format_double(c(0, 2)) << ' ' << format_double(c(1, 1)) << ' '
      << format_double(c(1, 2)) << ' ' << format_double(c(2, 2));
}

void emit_cov2(std::ostream& out, const Eigen::Matrix2d& c) {
  out << ' ' << format_double(c(0, 0)) << ' ' << format_double(c(0, 1)) << ' '
      << format_double(c(1, 1));
}

}  // namespace

std::string save_graph(const FactorGraph& g) {
  std::ostringstream out;
  for (const auto& v : g.variables()) {
    out << "VAR " << (v.kind == VarKind::kPose2 ? "POSE2" : "POINT2") << ' ' << v.name << '\n';
  }
  for (const auto& f : g.factors()) {
    if (const auto* m = std::get_if<PriorPose2>(&f.model)) {
      out << "PRIOR_POSE2 " << f.vars[0] << ' ' << format_double(m->mean.x) << ' '
          << format_double(m->mean.y) << ' ' << format_double(m->mean.theta);
      emit_cov3(out, m->cov);
    } else if (const auto* m = std::get_if<PriorPoint2>(&f.model)) {
      out << "PRIOR_POINT2 " << f.vars[0] << ' ' << format_double(m->mean.x) << ' '
          << format_double(m->mean.y);
      emit_cov2(out, m->cov);
    } else if (const auto* m = std::get_if<OdometryPose2>(&f.model)) {
      out << "ODOM_POSE2 " << f.vars[0] << ' ' << f.vars[1] << ' ' << format_double(m->rel.x)
          << ' ' << format_double(m->rel.y) << ' ' << format_double(m->rel.theta);
      emit_cov3(out, m->cov);
    } else if (const auto* m = std::get_if<Range>(&f.model)) {
      out << "RANGE " << f.vars[0] << ' ' << f.vars[1] << ' ' << format_double(m->z) << ' '
          << format_double(m->sigma);
    } else {
      const auto& amb = std::get<AmbiguousRange>(f.model);
      out << "AMB_RANGE " << f.vars[0] << ' ' << format_double(amb.z) << ' '
          << format_double(amb.sigma) << ' ' << f.vars.size() - 1;
      for (std::size_t i = 1; i < f.vars.size(); ++i) out << ' ' << f.vars[i];
    }
    out << '\n';
  }
  for (const auto& v : g.variables()) {
    if (!g.has_truth(v.name)) continue;
    const VarValue& t = g.truth_of(v.name);
    if (const Pose2* p = std::get_if<Pose2>(&t)) {
      out << "TRUTH_POSE2 " << v.name << ' ' << format_double(p->x) << ' '
          << format_double(p->y) << ' ' << format_double(p->theta) << '\n';
    } else {
      const Point2& pt = std::get<Point2>(t);
      out << "TRUTH_POINT2 " << v.name << ' ' << format_double(pt.x) << ' '
          << format_double(pt.y) << '\n';
    }
  }
  return out.str();
}

void save_graph_file(const FactorGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  }
  out << save_graph(g);
}

}  // namespace nfg

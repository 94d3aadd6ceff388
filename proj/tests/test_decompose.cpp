#include <doctest.h>

#include <numeric>

#include "nfg/decompose.hpp"
#include "nfg/errors.hpp"
#include "nfg/random.hpp"

using namespace nfg;

namespace {

// Union-find based acyclicity oracle over the variable graph induced by AC.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); }
  // Returns false if the edge closes a cycle.
  bool unite(int a, int b) {
    const int ra = find(a), rb = find(b);
    if (ra == rb) return false;
    parent[ra] = rb;
    return true;
  }
};

bool ac_is_acyclic_and_spanning(const FactorGraph& g, const Decomposition& d) {
  UnionFind uf(g.variables().size());
  std::vector<char> touched(g.variables().size(), 0);
  for (int id : d.ac) {
    const Factor& f = g.factor(id);
    for (int v : f.var_ids) touched[v] = 1;
    if (f.var_ids.size() == 2 && !uf.unite(f.var_ids[0], f.var_ids[1])) return false;
  }
  for (char t : touched) {
    if (!t) return false;
  }
  return true;
}

const Eigen::Matrix3d kCov3 = Eigen::Matrix3d::Identity() * 0.01;

}  // namespace

TEST_CASE("chain without loops is fully acyclic") {
  FactorGraph g;
  g.add_variable("x0", VarKind::kPose2);
  g.add_variable("x1", VarKind::kPose2);
  g.add_variable("x2", VarKind::kPose2);
  g.add_factor({"x0"}, PriorPose2{Pose2(), kCov3});
  g.add_factor({"x0", "x1"}, OdometryPose2{Pose2(1, 0, 0), kCov3});
  g.add_factor({"x1", "x2"}, OdometryPose2{Pose2(1, 0, 0), kCov3});

  const Decomposition d = decompose(g);
  CHECK(d.ac == std::vector<int>{0, 1, 2});
  CHECK(d.lc.empty());
}

TEST_CASE("landmark graph splits into a spanning set and one loop closure") {
  // Insertion order f0..f5: prior, range(x0,l0), odom(x0,x1), range(x1,l1),
  // odom(x1,x2), range(x2,l1). Replaying the queue keeps the first five in
  // AC and pushes the revisit of l1 into LC.
  FactorGraph g;
  g.add_variable("x0", VarKind::kPose2);
  g.add_variable("x1", VarKind::kPose2);
  g.add_variable("x2", VarKind::kPose2);
  g.add_variable("l0", VarKind::kPoint2);
  g.add_variable("l1", VarKind::kPoint2);
  g.add_factor({"x0"}, PriorPose2{Pose2(), kCov3});
  g.add_factor({"x0", "l0"}, Range{5.0, 0.5});
  g.add_factor({"x0", "x1"}, OdometryPose2{Pose2(2, 0, 0), kCov3});
  g.add_factor({"x1", "l1"}, Range{4.0, 0.5});
  g.add_factor({"x1", "x2"}, OdometryPose2{Pose2(2, 0, 0), kCov3});
  g.add_factor({"x2", "l1"}, Range{3.0, 0.5});

  const Decomposition d = decompose(g);
  CHECK(d.ac == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(d.lc == std::vector<int>{5});
}

TEST_CASE("factors over more than two variables always go to LC") {
  FactorGraph g;
  g.add_variable("x0", VarKind::kPose2);
  g.add_variable("l0", VarKind::kPoint2);
  g.add_variable("l1", VarKind::kPoint2);
  g.add_factor({"x0"}, PriorPose2{Pose2(), kCov3});
  g.add_factor({"x0", "l0", "l1"}, AmbiguousRange{5.0, 0.5});
  g.add_factor({"x0", "l0"}, Range{5.0, 0.5});
  g.add_factor({"x0", "l1"}, Range{5.0, 0.5});

  const Decomposition d = decompose(g);
  CHECK(d.lc == std::vector<int>{1});
  CHECK(d.ac == std::vector<int>{0, 2, 3});
}

TEST_CASE("re-queued factors resolve once their endpoint is covered") {
  // The range to l0 arrives before anything covers either endpoint; the
  // queue must cycle it to the tail and place it later.
  FactorGraph g;
  g.add_variable("l0", VarKind::kPoint2);
  g.add_variable("x0", VarKind::kPose2);
  g.add_variable("x1", VarKind::kPose2);
  g.add_factor({"x1", "l0"}, Range{2.0, 0.5});
  g.add_factor({"x0"}, PriorPose2{Pose2(), kCov3});
  g.add_factor({"x0", "x1"}, OdometryPose2{Pose2(1, 0, 0), kCov3});

  const Decomposition d = decompose(g);
  CHECK(d.ac == std::vector<int>{1, 2, 0});
  CHECK(d.lc.empty());
}

TEST_CASE("second prior on a covered variable becomes loop closing") {
  FactorGraph g;
  g.add_variable("x0", VarKind::kPose2);
  g.add_factor({"x0"}, PriorPose2{Pose2(), kCov3});
  g.add_factor({"x0"}, PriorPose2{Pose2(0.1, 0, 0), kCov3});

  const Decomposition d = decompose(g);
  CHECK(d.ac == std::vector<int>{0});
  CHECK(d.lc == std::vector<int>{1});
}

TEST_CASE("failure modes") {
  SUBCASE("no prior factor") {
    FactorGraph g;
    g.add_variable("x0", VarKind::kPose2);
    g.add_variable("x1", VarKind::kPose2);
    g.add_factor({"x0", "x1"}, OdometryPose2{Pose2(1, 0, 0), kCov3});
    CHECK_THROWS_AS(decompose(g), Error);
  }
  SUBCASE("variable reachable only through a multi-candidate factor") {
    FactorGraph g;
    g.add_variable("x0", VarKind::kPose2);
    g.add_variable("l0", VarKind::kPoint2);
    g.add_variable("l1", VarKind::kPoint2);
    g.add_factor({"x0"}, PriorPose2{Pose2(), kCov3});
    g.add_factor({"x0", "l0", "l1"}, AmbiguousRange{5.0, 0.5});
    CHECK_THROWS_WITH_AS(decompose(g), doctest::Contains("l0"), Error);
  }
  SUBCASE("disconnected component stalls the queue") {
    FactorGraph g;
    g.add_variable("x0", VarKind::kPose2);
    g.add_variable("x1", VarKind::kPose2);
    g.add_variable("x2", VarKind::kPose2);
    g.add_factor({"x0"}, PriorPose2{Pose2(), kCov3});
    g.add_factor({"x1", "x2"}, OdometryPose2{Pose2(1, 0, 0), kCov3});
    CHECK_THROWS_WITH_AS(decompose(g), doctest::Contains("x1"), Error);
  }
}

TEST_CASE("decomposition properties") {
  FactorGraph g;
  g.add_variable("x0", VarKind::kPose2);
  g.add_variable("x1", VarKind::kPose2);
  g.add_variable("x2", VarKind::kPose2);
  g.add_variable("x3", VarKind::kPose2);
  g.add_variable("l0", VarKind::kPoint2);
  g.add_factor({"x0"}, PriorPose2{Pose2(), kCov3});
  g.add_factor({"x0", "x1"}, OdometryPose2{Pose2(1, 0, 0), kCov3});
  g.add_factor({"x1", "x2"}, OdometryPose2{Pose2(1, 0, 0.2), kCov3});
  g.add_factor({"x2", "x3"}, OdometryPose2{Pose2(1, 0, 0.2), kCov3});
  g.add_factor({"x0", "x3"}, OdometryPose2{Pose2(2, 1, 0.6), kCov3});
  g.add_factor({"x0", "l0"}, Range{3.0, 0.5});
  g.add_factor({"x2", "l0"}, Range{2.0, 0.5});
  g.add_factor({"x3", "l0"}, Range{2.5, 0.5});

  const Decomposition d = decompose(g);

  SUBCASE("partition") {
    std::vector<char> seen(g.factors().size(), 0);
    for (int id : d.ac) seen[id]++;
    for (int id : d.lc) seen[id]++;
    for (char c : seen) CHECK(c == 1);
  }
  SUBCASE("acyclic and spanning (union-find oracle)") {
    CHECK(ac_is_acyclic_and_spanning(g, d));
  }
  SUBCASE("|AC| equals variable count when each prior covers a new variable") {
    CHECK(d.ac.size() == g.variables().size());
  }
  SUBCASE("deterministic") {
    const Decomposition again = decompose(g);
    CHECK(again.ac == d.ac);
    CHECK(again.lc == d.lc);
  }
  SUBCASE("density split identity") {
    Rng rng(8);
    for (int rep = 0; rep < 30; ++rep) {
      Assignment a(g.variables().size());
      for (std::size_t i = 0; i < g.variables().size(); ++i) {
        const int idx = static_cast<int>(i);
        if (g.variables()[i].kind == VarKind::kPose2) {
          a.set(idx, Pose2(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-3, 3)));
        } else {
          a.set(idx, Point2{rng.uniform(-5, 5), rng.uniform(-5, 5)});
        }
      }
      double ac_sum = 0.0, lc_sum = 0.0;
      for (int id : d.ac) ac_sum += g.factor_log_density(id, a);
      for (int id : d.lc) lc_sum += g.factor_log_density(id, a);
      CHECK(ac_sum + lc_sum == doctest::Approx(g.total_log_density(a)).epsilon(1e-10));
    }
  }
}

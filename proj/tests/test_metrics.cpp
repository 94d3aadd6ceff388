#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "nfg/errors.hpp"
#include "nfg/metrics.hpp"
#include "nfg/random.hpp"
#include "nfg/sample_io.hpp"

using namespace nfg;

namespace {

SampleMatrix make_matrix(const std::vector<std::string>& labels,
                         const std::vector<std::vector<double>>& rows) {
  SampleMatrix s;
  s.labels = labels;
  s.rows.resize(static_cast<long>(rows.size()), static_cast<long>(labels.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < labels.size(); ++j) {
      s.rows(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
    }
  }
  s.logw.assign(rows.size(), -std::log(static_cast<double>(rows.size())));
  return s;
}

SampleMatrix gaussian_cloud(std::size_t n, double mu_x, double mu_y, double sigma,
                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back({mu_x + sigma * rng.normal(), mu_y + sigma * rng.normal()});
  }
  return make_matrix({"l0.x", "l0.y"}, rows);
}

}  // namespace

TEST_CASE("sample_mean") {
  SUBCASE("single row is its own mean") {
    const SampleMatrix s = make_matrix({"x0.x", "x0.y", "x0.theta"}, {{1.0, 2.0, 0.5}});
    const Eigen::VectorXd m = sample_mean(s);
    CHECK(m[0] == 1.0);
    CHECK(m[1] == 2.0);
    CHECK(m[2] == 0.5);
  }
  SUBCASE("translations average arithmetically") {
    const SampleMatrix s = make_matrix({"l0.x", "l0.y"}, {{0, 0}, {2, 2}});
    const Eigen::VectorXd m = sample_mean(s);
    CHECK(m[0] == doctest::Approx(1.0));
    CHECK(m[1] == doctest::Approx(1.0));
  }
  SUBCASE("angles average circularly: {-3, 3} wraps to pi") {
    const SampleMatrix s = make_matrix({"x0.theta"}, {{-3.0}, {3.0}});
    const Eigen::VectorXd m = sample_mean(s);
    CHECK(m[0] == doctest::Approx(M_PI));
  }
  SUBCASE("antipodal angle mass has no mean") {
    const SampleMatrix s = make_matrix({"x0.theta"}, {{0.0}, {M_PI}});
    CHECK_THROWS_AS(sample_mean(s), Error);
  }
}

TEST_CASE("rmse") {
  const std::vector<std::string> labels{"x0.x", "x0.y", "x0.theta"};
  Eigen::VectorXd a(3), b(3);
  SUBCASE("zero for equal vectors") {
    a << 1, 2, 0.3;
    CHECK(rmse(a, a, labels) == 0.0);
  }
  SUBCASE("single offset spreads by 1/sqrt(d)") {
    a << 1, 2, 0.3;
    b << 4, 2, 0.3;
    CHECK(rmse(a, b, labels) == doctest::Approx(3.0 / std::sqrt(3.0)));
  }
  SUBCASE("angle differences wrap") {
    a << 0, 0, M_PI - 0.1;
    b << 0, 0, -M_PI + 0.1;
    CHECK(rmse(a, b, labels) == doctest::Approx(0.2 / std::sqrt(3.0)).epsilon(1e-9));
  }
  SUBCASE("dimension mismatch is rejected") {
    Eigen::VectorXd short_vec(2);
    short_vec << 0, 0;
    a << 0, 0, 0;
    CHECK_THROWS_AS(rmse(a, short_vec, labels), Error);
  }
}

TEST_CASE("mmd") {
  SUBCASE("identical sets give exactly zero") {
    const SampleMatrix s = gaussian_cloud(200, 0, 0, 1.0, 3);
    CHECK(mmd(s, s).mmd == 0.0);
  }
  SUBCASE("distant point masses approach sqrt(2) when the bandwidth is small") {
    const SampleMatrix a = make_matrix({"l0.x"}, std::vector<std::vector<double>>(50, {0.0}));
    const SampleMatrix b = make_matrix({"l0.x"}, std::vector<std::vector<double>>(50, {100.0}));
    // Pinned bandwidth << separation: k(x,x) = 1, cross terms vanish.
    const MmdDetail d = mmd(a, b, 1.0);
    CHECK(d.mmd == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    // The pooled median heuristic puts the bandwidth at the separation
    // scale instead, which keeps the cross term alive.
    const MmdDetail med = mmd(a, b);
    CHECK(med.bandwidth_sq == doctest::Approx(100.0 * 100.0));
    CHECK(med.mmd == doctest::Approx(std::sqrt(2.0 - 2.0 * std::exp(-0.5))).epsilon(1e-9));
  }
  SUBCASE("all points identical across both sets returns zero by convention") {
    const SampleMatrix a = make_matrix({"l0.x"}, std::vector<std::vector<double>>(10, {1.0}));
    CHECK(mmd(a, a).mmd == 0.0);
  }
  SUBCASE("symmetry") {
    const SampleMatrix a = gaussian_cloud(150, 0, 0, 1.0, 5);
    const SampleMatrix b = gaussian_cloud(150, 0.5, 0, 1.0, 6);
    CHECK(mmd(a, b).mmd == doctest::Approx(mmd(b, a).mmd).epsilon(1e-12));
  }
  SUBCASE("row permutation invariance") {
    const SampleMatrix a = gaussian_cloud(100, 0, 0, 1.0, 7);
    SampleMatrix shuffled = a;
    shuffled.rows.topRows(50) = a.rows.bottomRows(50);
    shuffled.rows.bottomRows(50) = a.rows.topRows(50);
    const SampleMatrix b = gaussian_cloud(100, 1, 0, 1.0, 8);
    CHECK(mmd(a, b).mmd == doctest::Approx(mmd(shuffled, b).mmd).epsilon(1e-12));
  }
  SUBCASE("same-distribution draws fall below the permutation null") {
    const std::size_t n = 500;
    const SampleMatrix a = gaussian_cloud(n, 0, 0, 1.0, 11);
    const SampleMatrix b = gaussian_cloud(n, 0, 0, 1.0, 12);
    const double observed = mmd(a, b).mmd;

    // Permutation oracle: pool, reshuffle, split, recompute.
    SampleMatrix pooled;
    pooled.labels = a.labels;
    pooled.rows.resize(static_cast<long>(2 * n), 2);
    pooled.rows.topRows(static_cast<long>(n)) = a.rows;
    pooled.rows.bottomRows(static_cast<long>(n)) = b.rows;

    Rng rng(13);
    std::vector<double> null;
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<std::size_t> perm(2 * n);
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t i = 2 * n - 1; i > 0; --i) {
        std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
      }
      SampleMatrix pa, pb;
      pa.labels = pb.labels = a.labels;
      pa.rows.resize(static_cast<long>(n), 2);
      pb.rows.resize(static_cast<long>(n), 2);
      for (std::size_t i = 0; i < n; ++i) {
        pa.rows.row(static_cast<long>(i)) = pooled.rows.row(static_cast<long>(perm[i]));
        pb.rows.row(static_cast<long>(i)) = pooled.rows.row(static_cast<long>(perm[n + i]));
      }
      pa.logw.assign(n, -std::log(static_cast<double>(n)));
      pb.logw.assign(n, -std::log(static_cast<double>(n)));
      null.push_back(mmd(pa, pb).mmd);
    }
    std::sort(null.begin(), null.end());
    const double q95 = null[static_cast<std::size_t>(0.95 * null.size())];
    CHECK(observed < q95);
  }
  SUBCASE("label mismatch is rejected") {
    const SampleMatrix a = gaussian_cloud(10, 0, 0, 1, 1);
    SampleMatrix b = a;
    b.labels = {"other.x", "other.y"};
    CHECK_THROWS_AS(mmd(a, b), Error);
  }
}

TEST_CASE("resample_matrix produces equal weights deterministically") {
  SampleMatrix s = gaussian_cloud(100, 0, 0, 1.0, 21);
  // Skew the weights toward the first half.
  for (std::size_t i = 0; i < 100; ++i) {
    s.logw[i] = i < 50 ? std::log(0.018) : std::log(0.002);
  }
  const SampleMatrix r1 = resample_matrix(s, 400, 5);
  const SampleMatrix r2 = resample_matrix(s, 400, 5);
  CHECK(r1.rows == r2.rows);
  CHECK(r1.logw[0] == doctest::Approx(-std::log(400.0)));

  // About 90% of the resampled rows come from the heavy half.
  std::set<double> heavy;
  for (long i = 0; i < 50; ++i) heavy.insert(s.rows(i, 0));
  long from_heavy = 0;
  for (long i = 0; i < r1.rows.rows(); ++i) {
    if (heavy.count(r1.rows(i, 0)) > 0) ++from_heavy;
  }
  CHECK(from_heavy == doctest::Approx(360).epsilon(0.02));
}

TEST_CASE("sample csv round trip") {
  SampleMatrix s = gaussian_cloud(25, 1.0, -2.0, 0.5, 33);
  s.labels = {"x0.x", "x0.y"};
  const std::string text = write_sample_csv(s);
  const SampleMatrix back = read_sample_csv(text);
  CHECK(back.labels == s.labels);
  CHECK(back.rows == s.rows);
  CHECK(back.logw == s.logw);
  CHECK(write_sample_csv(back) == text);

  CHECK_THROWS_AS(read_sample_csv(""), Error);
  CHECK_THROWS_AS(read_sample_csv("x,y\n1,2\n"), Error);
  CHECK_THROWS_AS(read_sample_csv("logw,x0.x\n0.0\n"), Error);
  CHECK_THROWS_AS(read_sample_csv("logw,x0.x\n0.0,abc\n"), Error);
}

#include "nfg/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "nfg/errors.hpp"
#include "nfg/geom.hpp"

namespace nfg {

namespace {

void check_labels(const SampleMatrix& a, const SampleMatrix& b) {
  if (a.labels != b.labels) {
    throw Error(ErrorCode::kInvalidArgument, "sample sets have mismatched column labels");
  }
}

// Embeds angle columns as (cos, sin) so the kernel sees no wrap seam.
Eigen::MatrixXd embed(const SampleMatrix& s) {
  int width = 0;
  for (const auto& l : s.labels) width += is_angle_label(l) ? 2 : 1;
  Eigen::MatrixXd out(s.rows.rows(), width);
  int col = 0;
  for (std::size_t j = 0; j < s.labels.size(); ++j) {
    const auto src = s.rows.col(static_cast<long>(j));
    if (is_angle_label(s.labels[j])) {
      out.col(col++) = src.array().cos();
      out.col(col++) = src.array().sin();
    } else {
      out.col(col++) = src;
    }
  }
  return out;
}

MmdDetail mmd_impl(const SampleMatrix& a, const SampleMatrix& b, const double* bandwidth_sq) {
  check_labels(a, b);
  if (a.size() == 0 || b.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "mmd needs nonempty sample sets");
  }
  const Eigen::MatrixXd ea = embed(a);
  const Eigen::MatrixXd eb = embed(b);
  const long na = ea.rows(), nb = eb.rows(), n = na + nb;

  Eigen::MatrixXd pooled(n, ea.cols());
  pooled.topRows(na) = ea;
  pooled.bottomRows(nb) = eb;

  // Pairwise squared distances via the Gram expansion.
  const Eigen::VectorXd sq = pooled.rowwise().squaredNorm();
  Eigen::MatrixXd dist2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
                          2.0 * (pooled * pooled.transpose());
  dist2 = dist2.cwiseMax(0.0);

  MmdDetail detail;
  detail.n_a = static_cast<std::size_t>(na);
  detail.n_b = static_cast<std::size_t>(nb);

  if (bandwidth_sq != nullptr) {
    detail.bandwidth_sq = *bandwidth_sq;
  } else {
    std::vector<double> upper;
    upper.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (long i = 0; i < n; ++i) {
      for (long j = i + 1; j < n; ++j) upper.push_back(dist2(i, j));
    }
    auto mid = upper.begin() + upper.size() / 2;
    std::nth_element(upper.begin(), mid, upper.end());
    detail.bandwidth_sq = *mid;
    if (detail.bandwidth_sq <= 0.0) {
      // All points coincide across both sets; the sets are indistinguishable.
      detail.mmd = 0.0;
      return detail;
    }
  }
  if (!(detail.bandwidth_sq > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mmd bandwidth must be > 0");
  }

  const Eigen::MatrixXd kernel = (-dist2 / (2.0 * detail.bandwidth_sq)).array().exp();
  const double kaa = kernel.topLeftCorner(na, na).mean();
  const double kbb = kernel.bottomRightCorner(nb, nb).mean();
  const double kab = kernel.topRightCorner(na, nb).mean();
  detail.mmd = std::sqrt(std::max(kaa + kbb - 2.0 * kab, 0.0));
  return detail;
}

}  // namespace

bool is_angle_label(const std::string& label) {
  const std::string suffix = ".theta";
  return label.size() > suffix.size() &&
         label.compare(label.size() - suffix.size(), suffix.size(), suffix) == 0;
}

SampleMatrix to_sample_matrix(const GraphSolveResult& result) {
  SampleMatrix s;
  s.labels = result.labels;
  const auto& dead = result.ns.dead;
  s.rows.resize(static_cast<long>(dead.size()), static_cast<long>(result.labels.size()));
  for (std::size_t i = 0; i < dead.size(); ++i) {
    for (std::size_t j = 0; j < result.labels.size(); ++j) {
      s.rows(static_cast<long>(i), static_cast<long>(j)) = dead[i].params[j];
    }
  }
  s.logw = result.ns.normalized_logw();
  return s;
}

SampleMatrix resample_matrix(const SampleMatrix& samples, std::size_t n, std::uint64_t seed) {
  if (samples.size() == 0 || n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "resample needs nonempty input and n >= 1");
  }
  const auto indices = systematic_resample(samples.logw, n, seed);
  SampleMatrix out;
  out.labels = samples.labels;
  out.rows.resize(static_cast<long>(n), samples.rows.cols());
  for (std::size_t i = 0; i < n; ++i) {
    out.rows.row(static_cast<long>(i)) = samples.rows.row(static_cast<long>(indices[i]));
  }
  out.logw.assign(n, -std::log(static_cast<double>(n)));
  return out;
}

Eigen::VectorXd sample_mean(const SampleMatrix& samples) {
  if (samples.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample_mean needs a nonempty set");
  }
  Eigen::VectorXd mean(samples.rows.cols());
  for (std::size_t j = 0; j < samples.labels.size(); ++j) {
    const auto col = samples.rows.col(static_cast<long>(j));
    if (is_angle_label(samples.labels[j])) {
      const double s = col.array().sin().sum();
      const double c = col.array().cos().sum();
      const double resultant = std::hypot(s, c) / static_cast<double>(samples.size());
      if (resultant < 1e-12) {
        throw Error(ErrorCode::kInvalidArgument,
                    "circular mean undefined for column '" + samples.labels[j] +
                        "': antipodal mass");
      }
      mean[static_cast<long>(j)] = std::atan2(s, c);
    } else {
      mean[static_cast<long>(j)] = col.mean();
    }
  }
  return mean;
}

double rmse(const Eigen::VectorXd& mean, const Eigen::VectorXd& reference,
            const std::vector<std::string>& labels) {
  if (mean.size() != reference.size() ||
      mean.size() != static_cast<long>(labels.size())) {
    throw Error(ErrorCode::kInvalidArgument, "rmse inputs have mismatched dimensions");
  }
  double sum = 0.0;
  for (long j = 0; j < mean.size(); ++j) {
    const double d = is_angle_label(labels[static_cast<std::size_t>(j)])
                         ? wrap_angle(mean[j] - reference[j])
                         : mean[j] - reference[j];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(mean.size()));
}

MmdDetail mmd(const SampleMatrix& a, const SampleMatrix& b) { return mmd_impl(a, b, nullptr); }

MmdDetail mmd(const SampleMatrix& a, const SampleMatrix& b, double bandwidth_sq) {
  return mmd_impl(a, b, &bandwidth_sq);
}

}  // namespace nfg

#include "nfg/nested.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nfg/errors.hpp"
#include "nfg/likelihood.hpp"
#include "nfg/prior_transform.hpp"
#include "nfg/random.hpp"

namespace nfg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double logsumexp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Triangle-fold into [0, 1], then clamp strictly inside the open interval.
double reflect_unit(double v) {
  v = std::fmod(v, 2.0);
  if (v < 0.0) v += 2.0;
  if (v > 1.0) v = 2.0 - v;
  return std::clamp(v, 1e-15, 1.0 - 1e-15);
}

void check_config(int dim, const NSConfig& c) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "sampling dimension must be >= 1");
  if (c.n_live < 10) throw Error(ErrorCode::kInvalidArgument, "n_live must be >= 10");
  if (c.walk_steps < 1) throw Error(ErrorCode::kInvalidArgument, "walk_steps must be >= 1");
  if (!(c.dlogz > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dlogz must be > 0");
  if (c.max_iters < 1) throw Error(ErrorCode::kInvalidArgument, "max_iters must be >= 1");
}

}  // namespace

std::vector<double> NSResult::normalized_logw() const {
  std::vector<double> out(dead.size());
  for (std::size_t i = 0; i < dead.size(); ++i) out[i] = dead[i].logw - logz;
  return out;
}

NSResult nested_sample(int dim, const PriorTransformFn& prior, const LogLikelihoodFn& loglike,
                       const NSConfig& config) {
  check_config(dim, config);
  const int n_live = config.n_live;
  const double ln_n = std::log(static_cast<double>(n_live));

  NSResult result;

  // Live population.
  std::vector<std::vector<double>> live_u(n_live, std::vector<double>(dim));
  std::vector<std::vector<double>> live_params(n_live);
  std::vector<double> live_logl(n_live);
  {
    Rng init_rng(derive_seed(config.seed, 0));
    for (int i = 0; i < n_live; ++i) {
      for (int k = 0; k < dim; ++k) live_u[i][k] = init_rng.uniform();
      live_params[i] = prior(live_u[i]);
      live_logl[i] = loglike(live_params[i]);
      ++result.n_calls;
    }
  }

  double logz = kNegInf;
  double h = 0.0;
  // Proposal scale, shared across iterations, adapted toward 50% acceptance.
  std::vector<double> scale(dim, 0.1);
  const double scale_step = std::exp(1.0 / dim);
  const double ln_shrink_width = std::log(std::sinh(1.0 / n_live));

  auto accumulate = [&](double logl, double log_dx) -> double {
    const double logwt = logl + log_dx;
    const double logz_new = logaddexp(logz, logwt);
    const double carried = logz == kNegInf ? 0.0 : std::exp(logz - logz_new) * (h + logz);
    const double h_new = std::exp(logwt - logz_new) * logl + carried - logz_new;
    logz = logz_new;
    if (std::isfinite(h_new)) h = h_new;
    return logwt;
  };

  int consecutive_stuck = 0;
  long iter = 0;
  while (true) {
    // Remaining-evidence stopping test against the current live set.
    const double logvol = -static_cast<double>(iter) / n_live;
    const double logz_remain = logsumexp(live_logl) - ln_n + logvol;
    if (logaddexp(logz, logz_remain) - logz < config.dlogz) {
      result.converged = true;
      break;
    }
    if (iter >= config.max_iters) {
      result.converged = false;
      result.diagnostic = "max_iters reached before the evidence converged";
      break;
    }
    ++iter;

    // Kill the worst live point; ties resolve to the lowest index.
    std::size_t worst = 0;
    for (std::size_t i = 1; i < live_logl.size(); ++i) {
      if (live_logl[i] < live_logl[worst]) worst = i;
    }
    const double logl_star = live_logl[worst];
    const double log_dx = -static_cast<double>(iter) / n_live + ln_shrink_width;
    const double logwt = accumulate(logl_star, log_dx);
    result.dead.push_back({live_params[worst], logl_star, logwt});

    // Replace by a likelihood-constrained random walk from a surviving point.
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(iter)));
    std::size_t start = rng.uniform_index(n_live - 1);
    if (start >= worst) ++start;

    std::vector<double> u = live_u[start];
    std::vector<double> cur_params = live_params[start];
    double cur_logl = live_logl[start];
    std::vector<double> proposal(dim);
    int accepts = 0;
    for (int s = 0; s < config.walk_steps; ++s) {
      for (int k = 0; k < dim; ++k) {
        proposal[k] = reflect_unit(u[k] + scale[k] * rng.normal());
      }
      std::vector<double> params = prior(proposal);
      const double logl = loglike(params);
      ++result.n_calls;
      if (logl > logl_star) {
        u = proposal;
        cur_params = std::move(params);
        cur_logl = logl;
        ++accepts;
        for (double& sc : scale) sc = std::min(sc * scale_step, 1.0);
      } else {
        for (double& sc : scale) sc = std::max(sc / scale_step, 1e-5);
      }
    }
    if (accepts == 0) {
      if (++consecutive_stuck >= 50 && !result.plateau) {
        result.plateau = true;
        result.diagnostic =
            "likelihood plateau: 50 consecutive replacement walks accepted no move";
      }
    } else {
      consecutive_stuck = 0;
    }
    live_u[worst] = std::move(u);
    live_params[worst] = std::move(cur_params);
    live_logl[worst] = cur_logl;
  }
  result.n_iters = iter;

  // Deposit the live set over the remaining volume, equal share each,
  // ordered by likelihood so the dead sequence stays nondecreasing.
  const double log_dx_live = -static_cast<double>(iter) / n_live - ln_n;
  std::vector<std::size_t> order(live_logl.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return live_logl[a] < live_logl[b]; });
  for (std::size_t idx : order) {
    const double logwt = accumulate(live_logl[idx], log_dx_live);
    result.dead.push_back({std::move(live_params[idx]), live_logl[idx], logwt});
  }

  result.logz = logz;
  result.h = h;
  result.logz_err = std::sqrt(std::max(h, 1e-12) / n_live);
  return result;
}

std::vector<std::size_t> systematic_resample(const std::vector<double>& logw, std::size_t n,
                                             std::uint64_t seed) {
  if (logw.empty() || n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "systematic_resample needs weights and n >= 1");
  }
  const double total = logsumexp(logw);
  std::vector<double> cumulative(logw.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    acc += std::exp(logw[i] - total);
    cumulative[i] = acc;
  }
  cumulative.back() = 1.0;

  Rng rng(derive_seed(seed, 0x5e5a));
  const double u0 = rng.uniform();
  std::vector<std::size_t> out;
  out.reserve(n);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = (static_cast<double>(i) + u0) / static_cast<double>(n);
    while (cumulative[j] < pos) ++j;
    out.push_back(j);
  }
  return out;
}

double effective_sample_size(const NSResult& result) {
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& d : result.dead) {
    const double w = std::exp(d.logw - result.logz);
    sum += w;
    sum_sq += w * w;
  }
  return sum_sq > 0.0 ? sum * sum / sum_sq : 0.0;
}

GraphSolveResult solve_graph(const FactorGraph& g, const Decomposition& d,
                             const NSConfig& config) {
  const PriorLayout layout = PriorLayout::build(g, d);
  const LikelihoodSpec spec = LikelihoodSpec::build(g, d);

  PriorTransformFn prior = [&g, layout](std::span<const double> u) {
    const PriorSample s = layout.transform(u);
    const Eigen::VectorXd row = g.flatten(s.assignment);
    return std::vector<double>(row.data(), row.data() + row.size());
  };
  LogLikelihoodFn loglike = [&g, spec](std::span<const double> params) {
    const Eigen::VectorXd row =
        Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<long>(params.size()));
    return log_likelihood(g, spec, g.unflatten(row));
  };

  GraphSolveResult out;
  out.ns = nested_sample(layout.dim(), prior, loglike, config);
  out.labels = g.coordinate_labels();
  return out;
}

std::vector<Assignment> resample_assignments(const FactorGraph& g, const NSResult& result,
                                             std::size_t n, std::uint64_t seed) {
  std::vector<double> logw(result.dead.size());
  for (std::size_t i = 0; i < result.dead.size(); ++i) logw[i] = result.dead[i].logw;
  std::vector<Assignment> out;
  out.reserve(n);
  for (std::size_t idx : systematic_resample(logw, n, seed)) {
    const auto& p = result.dead[idx].params;
    out.push_back(g.unflatten(Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<long>(p.size()))));
  }
  return out;
}

}  // namespace nfg

#include "crplab/martingale.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "crplab/numeric.hpp"
#include "crplab/parallel.hpp"
#include "crplab/rng.hpp"

namespace crplab {

namespace {

double require_sigma2(const ScalingParams& scaling, const char* who) {
  validate(scaling);
  if (scaling.alpha == 0.0)
    throw UnsupportedRegimeError(std::string(who) +
                                 ": alpha = 0 has Y identically 1; use petrov_diagnostics");
  return *constants(scaling).sigma2;
}

// y_path against a shared psi table (psis[j-1] = psi_{theta,j}, size >= n+1).
MartingalePath y_path_with_table(const Trajectory& traj, const ScalingParams& scaling,
                                 std::span<const double> psis) {
  const std::int64_t n = traj.n;
  const double theta = scaling.lambda * static_cast<double>(n);
  const double al = scaling.alpha;
  MartingalePath path;
  path.n = n;
  path.scaling = scaling;
  path.y.resize(static_cast<std::size_t>(n));
  for (std::int64_t j = 1; j <= n; ++j)
    path.y[static_cast<std::size_t>(j - 1)] =
        (theta + al * static_cast<double>(traj.k_path[static_cast<std::size_t>(j - 1)])) /
        psis[static_cast<std::size_t>(j - 1)];
  path.increments.resize(static_cast<std::size_t>(n - 1));
  path.bound.resize(static_cast<std::size_t>(n - 1));
  for (std::int64_t j = 1; j < n; ++j) {
    path.increments[static_cast<std::size_t>(j - 1)] =
        path.y[static_cast<std::size_t>(j)] - path.y[static_cast<std::size_t>(j - 1)];
    path.bound[static_cast<std::size_t>(j - 1)] = 2.0 / psis[static_cast<std::size_t>(j)];
  }
  return path;
}

VarianceReport conditional_variance_with_table(const MartingalePath& path, double sigma2,
                                               std::span<const double> psis) {
  const std::int64_t n = path.n;
  const double theta = path.scaling.lambda * static_cast<double>(n);
  const double al = path.scaling.alpha;
  const double scale = al * al * static_cast<double>(n) / sigma2;
  VarianceReport report;
  report.summands.resize(static_cast<std::size_t>(n));
  CompensatedSum v;
  for (std::int64_t j = 1; j <= n; ++j) {
    const double yj = path.y[static_cast<std::size_t>(j - 1)];
    const double d = theta + static_cast<double>(j) + al;
    double s = scale * (yj / (d * psis[static_cast<std::size_t>(j)]) - yj * yj / (d * d));
    if (s < 0.0 && s > -1e-15) s = 0.0;  // negative only by rounding
    report.summands[static_cast<std::size_t>(j - 1)] = s;
    v.add(s);
  }
  report.v2 = v.value();
  return report;
}

struct HallHeydeTerms {
  double increment = 0.0;  // sum_j |X_j|^(2+2 delta)
  double variance = 0.0;   // |sum_j X_j^2 - 1|^(1+delta)
};

HallHeydeTerms hall_heyde_path_terms(std::span<const double> increments, std::int64_t n,
                                     double sigma2, double delta) {
  const double x2_scale = static_cast<double>(n) / sigma2;
  CompensatedSum quad;
  CompensatedSum incr;
  for (const double dy : increments) {
    const double x2 = x2_scale * dy * dy;
    quad.add(x2);
    incr.add(delta == 1.0 ? x2 * x2 : std::pow(x2, 1.0 + delta));
  }
  HallHeydeTerms terms;
  terms.increment = incr.value();
  const double dev = std::abs(quad.value() - 1.0);
  terms.variance = delta == 1.0 ? dev * dev : std::pow(dev, 1.0 + delta);
  return terms;
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ContractError("delta must lie in (0, 1]");
}

}  // namespace

MartingalePath y_path(const Trajectory& traj, const ScalingParams& scaling) {
  require_sigma2(scaling, "y_path");
  validate(traj.params);
  if (traj.n < 1 || traj.k_path.size() != static_cast<std::size_t>(traj.n))
    throw ContractError("y_path: malformed trajectory");
  const ModelParams expected = scaling.at(traj.n);
  const double theta_tol = 1e-12 * std::max(1.0, std::abs(expected.theta));
  if (traj.params.alpha != expected.alpha ||
      std::abs(traj.params.theta - expected.theta) > theta_tol)
    throw ContractError("y_path: trajectory params do not match theta = lambda n scaling");
  const auto psis = psi_prefix(expected.theta, expected.alpha, traj.n + 1);
  return y_path_with_table(traj, scaling, psis);
}

VarianceReport conditional_variance(const MartingalePath& path) {
  const double sigma2 = require_sigma2(path.scaling, "conditional_variance");
  if (path.n < 1 || path.y.size() != static_cast<std::size_t>(path.n))
    throw ContractError("conditional_variance: malformed path");
  const double theta = path.scaling.lambda * static_cast<double>(path.n);
  const auto psis = psi_prefix(theta, path.scaling.alpha, path.n + 1);
  return conditional_variance_with_table(path, sigma2, psis);
}

OneStepMoments one_step_moment_check(std::int64_t state_k, std::int64_t j,
                                     const ScalingParams& scaling, std::int64_t n,
                                     std::int64_t m_samples, std::uint64_t seed) {
  const double sigma2 = require_sigma2(scaling, "one_step_moment_check");
  (void)sigma2;
  if (!(1 <= state_k && state_k <= j && j <= n))
    throw ContractError("one_step_moment_check: need 1 <= state_k <= j <= n");
  if (m_samples < 1) throw ContractError("one_step_moment_check: m_samples must be >= 1");

  const ModelParams params = scaling.at(n);
  const double theta = params.theta;
  const double al = params.alpha;
  const double z = theta + al * static_cast<double>(state_k);
  const double p = z / (theta + static_cast<double>(j));
  const double psi_j = psi(theta, al, j);
  const double psi_j1 = psi(theta, al, j + 1);

  // Integer success count: the reduction is exact and order-independent.
  std::atomic<std::int64_t> successes{0};
  parallel_blocks(m_samples, [&](std::int64_t lo, std::int64_t hi) {
    std::int64_t local = 0;
    for (std::int64_t r = lo; r < hi; ++r) {
      const double u = rng::unit_at(rng::stream_key(seed, static_cast<std::uint64_t>(r)),
                                    static_cast<std::uint64_t>(j));
      if (opens_new_table(params, j, state_k, u)) ++local;
    }
    successes.fetch_add(local, std::memory_order_relaxed);
  });

  const double m = static_cast<double>(m_samples);
  const double phat = static_cast<double>(successes.load()) / m;
  // dY = (z + alpha B)/psi_{j+1} - z/psi_j, B ~ Bernoulli(p); E dY = 0.
  const double mean_dy = (z / psi_j1 - z / psi_j) + al * phat / psi_j1;
  const double s = al / psi_j1;
  const double var_dy = s * s * phat * (1.0 - phat);
  const double var_theory = s * s * p * (1.0 - p);
  return OneStepMoments{std::abs(mean_dy), std::abs(var_dy - var_theory)};
}

HallHeydeEstimate hall_heyde_ln(std::span<const MartingalePath> paths, double delta) {
  if (paths.empty()) throw ContractError("hall_heyde_ln: empty path collection");
  check_delta(delta);
  const double sigma2 = require_sigma2(paths[0].scaling, "hall_heyde_ln");
  const std::int64_t n = paths[0].n;
  CompensatedSum incr;
  CompensatedSum var;
  for (const MartingalePath& path : paths) {
    if (path.n != n) throw ContractError("hall_heyde_ln: paths must share a common n");
    const auto terms = hall_heyde_path_terms(path.increments, n, sigma2, delta);
    incr.add(terms.increment);
    var.add(terms.variance);
  }
  const double inv = 1.0 / static_cast<double>(paths.size());
  return HallHeydeEstimate{incr.value() * inv, var.value() * inv};
}

double azuma_concentration_check(const ScalingParams& scaling, std::int64_t n, double eps,
                                 std::int64_t replicates, std::uint64_t seed) {
  require_sigma2(scaling, "azuma_concentration_check");
  if (n < 1) throw ContractError("azuma_concentration_check: n must be >= 1");
  if (!(eps > 0.0)) throw ContractError("azuma_concentration_check: eps must be positive");
  if (replicates < 1) throw ContractError("azuma_concentration_check: replicates must be >= 1");

  const ModelParams params = scaling.at(n);
  const double theta = params.theta;
  const double al = params.alpha;
  const auto psis = psi_prefix(theta, al, n);
  std::atomic<std::int64_t> violations{0};
  parallel_blocks(replicates, [&](std::int64_t lo, std::int64_t hi) {
    std::int64_t local = 0;
    for (std::int64_t r = lo; r < hi; ++r) {
      const std::uint64_t stream = rng::stream_key(seed, static_cast<std::uint64_t>(r));
      std::int64_t k = 1;
      bool hit = false;
      for (std::int64_t j = 1; j < n && !hit; ++j) {
        if (opens_new_table(params, j, k, rng::unit_at(stream, static_cast<std::uint64_t>(j))))
          ++k;
        const double y = (theta + al * static_cast<double>(k)) / psis[static_cast<std::size_t>(j)];
        hit = std::abs(y - 1.0) > eps;
      }
      if (hit) ++local;
    }
    violations.fetch_add(local, std::memory_order_relaxed);
  });
  return static_cast<double>(violations.load()) / static_cast<double>(replicates);
}

AzumaBound azuma_violation_bound(const ScalingParams& scaling, std::int64_t n, double eps) {
  require_sigma2(scaling, "azuma_violation_bound");
  if (n < 1) throw ContractError("azuma_violation_bound: n must be >= 1");
  if (!(eps > 0.0)) throw ContractError("azuma_violation_bound: eps must be positive");
  const auto psis = psi_prefix(scaling.lambda * static_cast<double>(n), scaling.alpha, n);
  CompensatedSum b;
  for (std::int64_t j = 1; j < n; ++j) {
    const double inc = 2.0 / psis[static_cast<std::size_t>(j)];
    b.add(inc * inc);
  }
  AzumaBound bound;
  bound.c_constant = static_cast<double>(n) * b.value();
  bound.probability =
      n == 1 ? 0.0
             : std::min(1.0, 2.0 * static_cast<double>(n) * std::exp(-eps * eps / (2.0 * b.value())));
  return bound;
}

VarianceReport petrov_diagnostics(double lambda, std::int64_t n) {
  if (!(lambda > 0.0)) throw ContractError("petrov_diagnostics: lambda must be positive");
  if (n < 1) throw ContractError("petrov_diagnostics: n must be >= 1");
  const double theta = lambda * static_cast<double>(n);
  CompensatedSum b;
  CompensatedSum third;
  for (std::int64_t j = 1; j < n; ++j) {
    const double p = theta / (theta + static_cast<double>(j));
    const double q = static_cast<double>(j) / (theta + static_cast<double>(j));
    b.add(p * q);
    third.add(p * q * (p * p + q * q));
  }
  VarianceReport report;
  report.degenerate = n == 1;
  report.sigma_n2 = b.value();
  if (!report.degenerate)
    report.lyapunov = third.value() / std::pow(report.sigma_n2, 1.5);
  return report;
}

double deterministic_variance_sum(const ScalingParams& scaling, std::int64_t n) {
  require_sigma2(scaling, "deterministic_variance_sum");
  if (n < 1) throw ContractError("deterministic_variance_sum: n must be >= 1");
  const double theta = scaling.lambda * static_cast<double>(n);
  const double al = scaling.alpha;
  const auto psis = psi_prefix(theta, al, n + 1);
  CompensatedSum s;
  for (std::int64_t j = 1; j <= n; ++j) {
    const double d = theta + static_cast<double>(j) + al;
    s.add(1.0 / (d * psis[static_cast<std::size_t>(j)]) - 1.0 / (d * d));
  }
  return al * al * static_cast<double>(n) * s.value();
}

PathBatchStats path_batch_stats(const ScalingParams& scaling, std::int64_t n,
                                std::int64_t paths, double delta, std::uint64_t seed) {
  const double sigma2 = require_sigma2(scaling, "path_batch_stats");
  if (n < 1) throw ContractError("path_batch_stats: n must be >= 1");
  if (paths < 1) throw ContractError("path_batch_stats: paths must be >= 1");
  check_delta(delta);

  const ModelParams params = scaling.at(n);
  const auto psis = psi_prefix(params.theta, params.alpha, n + 1);

  // Per-replicate slots; reductions run afterwards in index order so the
  // outcome does not depend on the worker count.
  std::vector<double> y_final(static_cast<std::size_t>(paths));
  std::vector<double> v2(static_cast<std::size_t>(paths));
  std::vector<double> term_incr(static_cast<std::size_t>(paths));
  std::vector<double> term_var(static_cast<std::size_t>(paths));
  std::vector<std::int64_t> violations(static_cast<std::size_t>(paths));

  parallel_blocks(paths, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t r = lo; r < hi; ++r) {
      const Trajectory traj =
          sample_trajectory_stream(params, n, rng::stream_key(seed, static_cast<std::uint64_t>(r)));
      const MartingalePath path = y_path_with_table(traj, scaling, psis);
      std::int64_t bad = 0;
      for (std::size_t i = 0; i < path.increments.size(); ++i)
        if (std::abs(path.increments[i]) > path.bound[i]) ++bad;
      const auto terms = hall_heyde_path_terms(path.increments, n, sigma2, delta);
      const std::size_t slot = static_cast<std::size_t>(r);
      y_final[slot] = path.y.back();
      v2[slot] = conditional_variance_with_table(path, sigma2, psis).v2;
      term_incr[slot] = terms.increment;
      term_var[slot] = terms.variance;
      violations[slot] = bad;
    }
  });

  PathBatchStats stats;
  stats.paths = paths;
  CompensatedSum sy, sv, si, st;
  for (std::int64_t r = 0; r < paths; ++r) {
    const std::size_t slot = static_cast<std::size_t>(r);
    stats.increment_violations += violations[slot];
    sy.add(y_final[slot]);
    sv.add(v2[slot]);
    si.add(term_incr[slot]);
    st.add(term_var[slot]);
    stats.max_v2 = std::max(stats.max_v2, v2[slot]);
  }
  const double inv = 1.0 / static_cast<double>(paths);
  stats.mean_y_final = sy.value() * inv;
  stats.mean_v2 = sv.value() * inv;
  stats.hall_heyde = HallHeydeEstimate{si.value() * inv, st.value() * inv};
  return stats;
}

}  // namespace crplab

#include "crplab/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "crplab/numeric.hpp"
#include "crplab/parallel.hpp"
#include "crplab/rng.hpp"

namespace crplab {

void validate(const ModelParams& params) {
  if (!(params.alpha >= 0.0 && params.alpha < 1.0))
    throw ContractError("ModelParams: alpha must lie in [0, 1)");
  if (!(params.theta > -params.alpha))
    throw ContractError("ModelParams: theta must exceed -alpha");
}

void validate(const ScalingParams& params) {
  if (!(params.alpha >= 0.0 && params.alpha < 1.0))
    throw ContractError("ScalingParams: alpha must lie in [0, 1)");
  if (!(params.lambda > 0.0)) throw ContractError("ScalingParams: lambda must be positive");
}

void validate(const TableState& state) {
  if (state.counts.empty()) throw ContractError("TableState: no occupied tables");
  if (state.k != static_cast<std::int64_t>(state.counts.size()))
    throw ContractError("TableState: k does not match counts");
  std::int64_t total = 0;
  for (const std::int64_t c : state.counts) {
    if (c < 1) throw ContractError("TableState: table counts must be >= 1");
    total += c;
  }
  if (total != state.n) throw ContractError("TableState: n does not match counts");
}

TableState gcrp_step(const TableState& state, const ModelParams& params, double u) {
  validate(params);
  validate(state);
  if (!(u >= 0.0 && u < 1.0)) throw ContractError("gcrp_step: u must lie in [0, 1)");

  TableState next = state;
  next.n += 1;
  if (opens_new_table(params, state.n, state.k, u)) {
    next.counts.push_back(1);
    next.k += 1;
    return next;
  }
  // Existing table: first index whose cumulative weight exceeds the target.
  const double target = u * (params.theta + static_cast<double>(state.n));
  double acc = 0.0;
  std::size_t pick = state.counts.size() - 1;  // rounding fallback: last table
  for (std::size_t i = 0; i < state.counts.size(); ++i) {
    acc += static_cast<double>(state.counts[i]) - params.alpha;
    if (target < acc) {
      pick = i;
      break;
    }
  }
  next.counts[pick] += 1;
  return next;
}

Trajectory sample_trajectory_stream(const ModelParams& params, std::int64_t n,
                                    std::uint64_t stream) {
  validate(params);
  if (n < 1) throw ContractError("gcrp_sample: n must be >= 1");
  Trajectory traj;
  traj.n = n;
  traj.params = params;
  traj.k_path.resize(static_cast<std::size_t>(n));
  traj.k_path[0] = 1;  // first customer always opens a table
  std::int64_t k = 1;
  for (std::int64_t j = 1; j < n; ++j) {
    if (opens_new_table(params, j, k, rng::unit_at(stream, static_cast<std::uint64_t>(j)))) ++k;
    traj.k_path[static_cast<std::size_t>(j)] = k;
  }
  return traj;
}

Trajectory gcrp_sample(const ModelParams& params, std::int64_t n, std::uint64_t seed) {
  return sample_trajectory_stream(params, n, rng::stream_key(seed, 0));
}

std::vector<std::int64_t> sample_k_batch(const ScalingParams& scaling, std::int64_t n,
                                         std::int64_t replicates, std::uint64_t seed) {
  validate(scaling);
  if (n < 1) throw ContractError("sample_k_batch: n must be >= 1");
  if (replicates < 1) throw ContractError("sample_k_batch: replicates must be >= 1");
  const ModelParams params = scaling.at(n);
  std::vector<std::int64_t> out(static_cast<std::size_t>(replicates));
  parallel_blocks(replicates, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t r = lo; r < hi; ++r) {
      const std::uint64_t stream = rng::stream_key(seed, static_cast<std::uint64_t>(r));
      std::int64_t k = 1;
      for (std::int64_t j = 1; j < n; ++j) {
        if (opens_new_table(params, j, k, rng::unit_at(stream, static_cast<std::uint64_t>(j))))
          ++k;
      }
      out[static_cast<std::size_t>(r)] = k;
    }
  });
  return out;
}

KDistribution exact_k_distribution(const ModelParams& params, std::int64_t n) {
  validate(params);
  if (n < 1) throw ContractError("exact_k_distribution: n must be >= 1");
  if (n > kMaxExactKDistributionN)
    throw BudgetError("exact_k_distribution: n exceeds the O(n^2) budget of " +
                      std::to_string(kMaxExactKDistributionN));

  KDistribution dist;
  dist.n = n;
  dist.params = params;
  dist.pmf.assign(static_cast<std::size_t>(n), 0.0);
  dist.pmf[0] = 1.0;  // K_1 = 1
  for (std::int64_t j = 1; j < n; ++j) {
    const double denom = params.theta + static_cast<double>(j);
    // In-place update, descending k: after the step the support is 1..j+1.
    for (std::int64_t k = std::min<std::int64_t>(j + 1, n); k >= 1; --k) {
      const double stay =
          k <= j ? dist.pmf[static_cast<std::size_t>(k - 1)] *
                       ((static_cast<double>(j) - params.alpha * static_cast<double>(k)) / denom)
                 : 0.0;
      const double open =
          k >= 2 ? dist.pmf[static_cast<std::size_t>(k - 2)] *
                       ((params.theta + params.alpha * static_cast<double>(k - 1)) / denom)
                 : 0.0;
      dist.pmf[static_cast<std::size_t>(k - 1)] = stay + open;
    }
  }
  return dist;
}

double exact_partition_pmf(const ModelParams& params, std::vector<std::int64_t> block_sizes) {
  validate(params);
  if (block_sizes.empty()) throw ContractError("exact_partition_pmf: block_sizes is empty");
  for (const std::int64_t b : block_sizes)
    if (b < 1) throw ContractError("exact_partition_pmf: block sizes must be >= 1");
  std::sort(block_sizes.begin(), block_sizes.end());

  const std::int64_t k = static_cast<std::int64_t>(block_sizes.size());
  std::int64_t n = 0;
  for (const std::int64_t b : block_sizes) n += b;

  CompensatedSum logp;
  logp.add(std::lgamma(static_cast<double>(n) + 1.0));  // multinomial numerator
  for (const std::int64_t b : block_sizes) logp.add(-std::lgamma(static_cast<double>(b) + 1.0));
  logp.add(-std::lgamma(static_cast<double>(k) + 1.0));  // 1/k!
  // Rising-factorial ratio with the shared leading theta cancelled, keeping
  // every log argument positive for all theta > -alpha.
  logp.add(log_rising_factorial(params.theta + params.alpha, k - 1, params.alpha));
  logp.add(-log_rising_factorial(params.theta + 1.0, n - 1, 1.0));
  for (const std::int64_t b : block_sizes)
    logp.add(log_rising_factorial(1.0 - params.alpha, b - 1, 1.0));
  return std::exp(logp.value());
}

namespace {

// k! for k <= kMaxEnumerationN, exact in double.
double small_factorial(std::int64_t k) {
  static constexpr std::array<double, 11> table = {1.0,    1.0,     2.0,      6.0,
                                                   24.0,   120.0,   720.0,    5040.0,
                                                   40320.0, 362880.0, 3628800.0};
  return table[static_cast<std::size_t>(k)];
}

// Number of distinct orderings of a descending size vector: k!/prod(mult!).
double distinct_orderings(const std::vector<std::int64_t>& parts) {
  double w = small_factorial(static_cast<std::int64_t>(parts.size()));
  std::size_t i = 0;
  while (i < parts.size()) {
    std::size_t j = i;
    while (j < parts.size() && parts[j] == parts[i]) ++j;
    w /= small_factorial(static_cast<std::int64_t>(j - i));
    i = j;
  }
  return w;
}

template <typename Visit>
void for_each_integer_partition(std::int64_t n, std::vector<std::int64_t>& parts,
                                std::int64_t max_part, const Visit& visit) {
  if (n == 0) {
    visit(parts);
    return;
  }
  for (std::int64_t p = std::min(n, max_part); p >= 1; --p) {
    parts.push_back(p);
    for_each_integer_partition(n - p, parts, p, visit);
    parts.pop_back();
  }
}

}  // namespace

EnumerationCheck enumerate_partition_check(const ModelParams& params, std::int64_t n) {
  validate(params);
  if (n < 1) throw ContractError("enumerate_partition_check: n must be >= 1");
  if (n > kMaxEnumerationN)
    throw BudgetError("enumerate_partition_check: n exceeds the enumeration budget of " +
                      std::to_string(kMaxEnumerationN));

  EnumerationCheck check;
  check.k_marginal.n = n;
  check.k_marginal.params = params;
  check.k_marginal.pmf.assign(static_cast<std::size_t>(n), 0.0);

  CompensatedSum total;
  std::vector<std::int64_t> parts;
  for_each_integer_partition(n, parts, n, [&](const std::vector<std::int64_t>& sizes) {
    const double mass = exact_partition_pmf(params, sizes) * distinct_orderings(sizes);
    total.add(mass);
    check.k_marginal.pmf[sizes.size() - 1] += mass;
  });
  check.total_mass = total.value();
  return check;
}

}  // namespace crplab

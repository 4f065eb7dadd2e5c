#pragma once

#include <cstdint>
#include <vector>

#include "crplab/errors.hpp"

namespace crplab {

// Ewens--Pitman parameters: 0 <= alpha < 1 and theta > -alpha.
struct ModelParams {
  double alpha = 0.0;
  double theta = 1.0;
};

// Linear-diversity scaling theta(n) = lambda * n, lambda > 0.
struct ScalingParams {
  double alpha = 0.0;
  double lambda = 1.0;

  ModelParams at(std::int64_t n) const {
    return ModelParams{alpha, lambda * static_cast<double>(n)};
  }
};

void validate(const ModelParams& params);
void validate(const ScalingParams& params);

// Occupied-table counts of a restaurant with n seated customers at k tables.
struct TableState {
  std::vector<std::int64_t> counts;
  std::int64_t n = 0;
  std::int64_t k = 0;
};

void validate(const TableState& state);

// Per-step record of the number of occupied tables: k_path[j-1] = K_j.
struct Trajectory {
  std::int64_t n = 0;
  ModelParams params;
  std::vector<std::int64_t> k_path;
};

// Exact law of K_n: pmf[k-1] = P(K_n = k) for k = 1..n.
struct KDistribution {
  std::int64_t n = 0;
  ModelParams params;
  std::vector<double> pmf;
};

// Resource budgets for the exact oracles.
inline constexpr std::int64_t kMaxExactKDistributionN = 100000;  // O(n^2) recursion
inline constexpr std::int64_t kMaxEnumerationN = 10;             // Bell-number growth

// The next customer opens a new table when j customers sit at k tables.
// Pure in (params, j, k, u). The full-state step and the collapsed K-chain
// both branch on this exact expression, so they produce identical K-paths
// from the same uniform stream.
inline bool opens_new_table(const ModelParams& params, std::int64_t j, std::int64_t k,
                            double u) {
  return u >= (static_cast<double>(j) - params.alpha * static_cast<double>(k)) /
                  (params.theta + static_cast<double>(j));
}

// One seating transition driven by the caller-supplied uniform u in [0,1).
// Outcomes are laid out cumulatively: existing tables in index order, then
// the new table.
TableState gcrp_step(const TableState& state, const ModelParams& params, double u);

// n-step run from the deterministic first customer onward. k_path depends
// only on (params, n, seed).
Trajectory gcrp_sample(const ModelParams& params, std::int64_t n, std::uint64_t seed);

// As gcrp_sample, but drawing uniforms from an explicit stream key. Batch
// drivers use rng::stream_key(seed, replicate) so replicate r is the same
// path no matter which worker produces it.
Trajectory sample_trajectory_stream(const ModelParams& params, std::int64_t n,
                                    std::uint64_t stream);

// `replicates` independent draws of K_n with theta = lambda * n. Replicate r
// reads stream_key(seed, r); the output is invariant under the worker count.
std::vector<std::int64_t> sample_k_batch(const ScalingParams& scaling, std::int64_t n,
                                         std::int64_t replicates, std::uint64_t seed);

// Exact pmf of K_n by forward recursion over the occupied-table count, which
// is Markov: a new table opens with probability (theta + alpha k)/(theta + j)
// after j customers.
KDistribution exact_k_distribution(const ModelParams& params, std::int64_t n);

// Probability mass the model assigns to one ordered vector of block sizes,
// evaluated in log space via log-gamma. Symmetric under permutation of
// block_sizes (the sizes are sorted internally).
double exact_partition_pmf(const ModelParams& params, std::vector<std::int64_t> block_sizes);

struct EnumerationCheck {
  double total_mass = 0.0;
  KDistribution k_marginal;
};

// Independent oracle: sums exact_partition_pmf over every size multiset of
// {1..n}, each weighted by its number of distinct orderings (equivalently,
// the per-set-partition mass times the number of set partitions with those
// sizes). total_mass must come out as 1 and the k-marginal must match
// exact_k_distribution.
EnumerationCheck enumerate_partition_check(const ModelParams& params, std::int64_t n);

}  // namespace crplab

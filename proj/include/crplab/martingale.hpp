#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "crplab/asymptotics.hpp"
#include "crplab/model.hpp"

namespace crplab {

// Normalized path Y_{n,j} = (theta + alpha K_j)/psi_{theta,j} with theta =
// lambda n: a mean-one martingale in j whose increments obey the almost-sure
// bound |Y_{j+1} - Y_j| <= 2/psi_{theta,j+1}. Defined for alpha > 0; at
// alpha = 0 the path is identically 1 and callers use petrov_diagnostics.
struct MartingalePath {
  std::int64_t n = 0;
  ScalingParams scaling;
  std::vector<double> y;           // y[j-1] = Y_{n,j}, j = 1..n
  std::vector<double> increments;  // increments[j-1] = Y_{n,j+1} - Y_{n,j}
  std::vector<double> bound;       // bound[j-1] = 2/psi_{theta,j+1}
};

MartingalePath y_path(const Trajectory& traj, const ScalingParams& scaling);

// Conditional variance, Lyapunov and normalization diagnostics. Each
// operation fills the fields it computes; the rest stay NaN.
struct VarianceReport {
  double v2 = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> summands;
  double ln_hall_heyde = std::numeric_limits<double>::quiet_NaN();
  double delta = std::numeric_limits<double>::quiet_NaN();
  double lyapunov = std::numeric_limits<double>::quiet_NaN();
  double sigma_n2 = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
};

// V_n^2 of a path from the closed form
//   (alpha^2 n / sigma^2) sum_j [ Y_j/((ln+j+alpha) psi_{ln,j+1})
//                                 - Y_j^2/(ln+j+alpha)^2 ],
// exact given the path. Summands are clamped to zero only when a value is
// negative by rounding (above -1e-15); anything larger is reported raw.
VarianceReport conditional_variance(const MartingalePath& path);

// Empirical one-step moment errors from a frozen state K_j = state_k:
// mean_err = |empirical E dY| (target 0), var_err = |empirical Var dY -
// (alpha^2/psi_{j+1}^2) p (1-p)| with p = (theta + alpha state_k)/(theta+j).
struct OneStepMoments {
  double mean_err = 0.0;
  double var_err = 0.0;
};

OneStepMoments one_step_moment_check(std::int64_t state_k, std::int64_t j,
                                     const ScalingParams& scaling, std::int64_t n,
                                     std::int64_t m_samples, std::uint64_t seed);

// Monte Carlo normalization-rate estimate
//   L_n ~= mean_paths sum_j |X_j|^(2+2 delta)
//        + mean_paths | sum_j X_j^2 - 1 |^(1+delta),
// X_j = (sqrt(n)/sigma) dY_j. The variance addend uses the realized squared
// increments, which share the predictable form's mean and make the estimate
// a pure functional of the supplied paths.
struct HallHeydeEstimate {
  double increment_term = 0.0;
  double variance_term = 0.0;
  double value() const { return increment_term + variance_term; }
};

HallHeydeEstimate hall_heyde_ln(std::span<const MartingalePath> paths, double delta);

// Fraction of replicates in which |Y_{n,j} - 1| > eps for some j <= n.
double azuma_concentration_check(const ScalingParams& scaling, std::int64_t n, double eps,
                                 std::int64_t replicates, std::uint64_t seed);

// Tail bound implied by the implemented increment bounds: with
// B = sum_j (2/psi_{ln,j+1})^2, probability = min(1, 2 n exp(-eps^2/(2B)))
// and c_constant = n * B (the constant in sum |dY|^2 <= c/n).
struct AzumaBound {
  double probability = 1.0;
  double c_constant = 0.0;
};

AzumaBound azuma_violation_bound(const ScalingParams& scaling, std::int64_t n, double eps);

// Exact independent-summand diagnostics for alpha = 0: with
// p_j = ln/(ln+j), sigma_n2 = sum_{j=1}^{n-1} p_j (1-p_j) and
// lyapunov = sigma_n2^{-3/2} sum p_j(1-p_j)(p_j^2 + (1-p_j)^2).
// n = 1 has an empty sum and is flagged degenerate.
VarianceReport petrov_diagnostics(double lambda, std::int64_t n);

// Deterministic centering of V_n^2:
//   alpha^2 n sum_{j=1}^n [ 1/((ln+j+alpha) psi_{ln,j+1}) - 1/(ln+j+alpha)^2 ],
// computed with exact psi; converges to sigma2 at rate 1/n.
double deterministic_variance_sum(const ScalingParams& scaling, std::int64_t n);

// One streaming pass over `paths` freshly sampled replicates (replicate r on
// stream_key(seed, r)): per-path increment-bound violations, final-Y and V^2
// means, the empirical max of V^2, and the Hall-Heyde estimate. Identical to
// composing sample_trajectory_stream + y_path + conditional_variance +
// hall_heyde_ln per replicate, without materializing the collection.
struct PathBatchStats {
  std::int64_t paths = 0;
  std::int64_t increment_violations = 0;
  double mean_y_final = 0.0;
  double mean_v2 = 0.0;
  double max_v2 = 0.0;
  HallHeydeEstimate hall_heyde;
};

PathBatchStats path_batch_stats(const ScalingParams& scaling, std::int64_t n,
                                std::int64_t paths, double delta, std::uint64_t seed);

}  // namespace crplab

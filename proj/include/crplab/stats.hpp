#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "crplab/model.hpp"

namespace crplab {

// Standard normal CDF, absolute error below 1e-12, clamped to [0, 1].
double normal_cdf(double x);

// Replicate values of (sqrt(n)/s) (K_n/n - m) for one (scaling, n) cell.
struct StandardizedSample {
  std::vector<double> values;
  std::int64_t n = 0;
  ScalingParams scaling;
};

StandardizedSample standardize(std::span<const std::int64_t> samples,
                               const ScalingParams& scaling, std::int64_t n);

// Exact one-sample Kolmogorov statistic against the standard normal:
// max over the sorted values of max(i/M - F(v_i), F(v_i) - (i-1)/M).
// The two-sided form counts duplicate (lattice) values correctly.
double ks_to_normal(const StandardizedSample& sample);

// sup_x | Phi((x-a)/b) - Phi(x) |, dense grid plus golden-section refinement
// to about 1e-10 absolute. Requires b > 0.
double shift_scale_normal_distance(double a, double b);

// Kolmogorov distances over a ladder of n values, for rate fitting.
struct KsReport {
  std::vector<std::int64_t> n_values;
  std::vector<double> ks;
  double fitted_slope = std::numeric_limits<double>::quiet_NaN();
  std::int64_t replicates = 0;
};

// Least-squares slope of log(ks) against log(n); needs >= 3 points.
double fit_rate(const KsReport& report);

// Total variation distance between an exact pmf over 1..n and the empirical
// frequencies of integer samples in that range.
double tv_distance(const KDistribution& p, std::span<const std::int64_t> q_empirical);

}  // namespace crplab

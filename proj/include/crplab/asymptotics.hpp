#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "crplab/model.hpp"

namespace crplab {

// Closed-form constants of the linear-diversity regime.
//
//   m      : almost-sure limit of K_n / n
//   s2     : variance constant of the CLT normalization
//   sigma2 : variance constant of the normalized martingale (alpha > 0 only)
//   a      : integral of (lambda + x)^{-1-alpha} over [0, 1]
struct Constants {
  double m = 0.0;
  double s2 = 0.0;
  std::optional<double> sigma2;
  double a = 0.0;
};

Constants constants(const ScalingParams& scaling);

// phi_{theta,j}: the deterministic product prod_{i=1}^{j-1} (1 + alpha/(i+theta)),
// with phi_{theta,1} = 1. Evaluated as a direct product for small j and through
// log-gamma beyond the crossover; both branches agree to ~1e-12 relative.
double phi(double theta, double alpha, std::int64_t j);

// psi_{theta,j} = (theta + alpha) * phi_{theta,j}; the mean of theta + alpha K_j.
double psi(double theta, double alpha, std::int64_t j);

// psi_{theta,1..count} in one O(count) pass (compensated log-space product).
std::vector<double> psi_prefix(double theta, double alpha, std::int64_t count);

// E K_n, exact: (psi_{theta,n} - theta)/alpha for alpha > 0, harmonic-type sum
// for alpha = 0.
double exact_mean_k(const ModelParams& params, std::int64_t n);

// Two-term large-z expansion of Gamma(z+a)/Gamma(z+b).
struct GammaRatioApprox {
  double value = 0.0;        // z^(a-b) * (1 + (a-b)(a+b-1)/(2z))
  double first_order = 0.0;  // z^(a-b)
  double z = 0.0;
  double a = 0.0;
  double b = 0.0;
};

GammaRatioApprox gamma_ratio_expansion(double z, double a, double b);

// Reference value for error measurement; requires z+a > 0 and z+b > 0.
double exact_gamma_ratio(double z, double a, double b);

// Right Riemann sum of f over [0,1] with a certified error bound.
// deriv_sup must bound sup |f'| on [0,1]; then |sum - integral| <= deriv_sup/n.
struct RiemannSum {
  double sum = 0.0;
  double error_bound = 0.0;
};

RiemannSum riemann_right_sum(const std::function<double(double)>& f, std::int64_t n,
                             double deriv_sup);

// Finite-n gaps behind the law of large numbers, computed with exact
// log-gamma phi values:
//   phi_gap          = | phi_{ln,n} - (1 + 1/lambda)^alpha |
//   weighted_sum_gap = | (phi_{ln,n}/n) sum_i ln/((ln+i) phi_{ln,i}) - m |
// Both decay like 1/n.
struct PhiLimitGaps {
  double phi_gap = 0.0;
  double weighted_sum_gap = 0.0;
};

PhiLimitGaps phi_limit_gaps(const ScalingParams& scaling, std::int64_t n);

}  // namespace crplab

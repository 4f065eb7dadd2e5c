#include "crplab/asymptotics.hpp"

#include <cmath>

#include "crplab/numeric.hpp"

namespace crplab {

namespace {
constexpr std::int64_t kPhiProductCrossover = 64;
}

Constants constants(const ScalingParams& scaling) {
  validate(scaling);
  const double lam = scaling.lambda;
  const double al = scaling.alpha;
  Constants c;
  if (al == 0.0) {
    c.m = lam * std::log1p(1.0 / lam);
    c.s2 = c.m - lam / (1.0 + lam);
    c.a = std::log1p(1.0 / lam);
  } else {
    const double g = std::pow(1.0 + 1.0 / lam, al);
    c.m = lam / al * (g - 1.0);
    c.s2 = lam / al * (g * g * (1.0 - al / (1.0 + lam)) - g);
    c.sigma2 = al / lam * (1.0 - std::pow(lam / (1.0 + lam), al) - al / (1.0 + lam));
    c.a = (std::pow(lam, -al) - std::pow(1.0 + lam, -al)) / al;
  }
  return c;
}

double phi(double theta, double alpha, std::int64_t j) {
  validate(ModelParams{alpha, theta});
  if (j < 1) throw ContractError("phi: j must be >= 1");
  if (j == 1 || alpha == 0.0) return 1.0;
  if (j <= kPhiProductCrossover) {
    double p = 1.0;
    for (std::int64_t i = 1; i < j; ++i) p *= 1.0 + alpha / (static_cast<double>(i) + theta);
    return p;
  }
  const double dj = static_cast<double>(j);
  return std::exp(std::lgamma(theta + dj + alpha) + std::lgamma(theta + 1.0) -
                  std::lgamma(theta + 1.0 + alpha) - std::lgamma(theta + dj));
}

double psi(double theta, double alpha, std::int64_t j) {
  return (theta + alpha) * phi(theta, alpha, j);
}

std::vector<double> psi_prefix(double theta, double alpha, std::int64_t count) {
  validate(ModelParams{alpha, theta});
  if (count < 1) throw ContractError("psi_prefix: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  out[0] = theta + alpha;
  CompensatedSum log_phi;
  for (std::int64_t j = 2; j <= count; ++j) {
    log_phi.add(std::log1p(alpha / (static_cast<double>(j - 1) + theta)));
    out[static_cast<std::size_t>(j - 1)] = (theta + alpha) * std::exp(log_phi.value());
  }
  return out;
}

double exact_mean_k(const ModelParams& params, std::int64_t n) {
  validate(params);
  if (n < 1) throw ContractError("exact_mean_k: n must be >= 1");
  if (params.alpha == 0.0) {
    CompensatedSum s;
    s.add(1.0);
    for (std::int64_t j = 1; j < n; ++j) s.add(params.theta / (params.theta + static_cast<double>(j)));
    return s.value();
  }
  return (psi(params.theta, params.alpha, n) - params.theta) / params.alpha;
}

GammaRatioApprox gamma_ratio_expansion(double z, double a, double b) {
  if (!(z > 0.0)) throw ContractError("gamma_ratio_expansion: z must be positive");
  GammaRatioApprox approx;
  approx.z = z;
  approx.a = a;
  approx.b = b;
  approx.first_order = std::pow(z, a - b);
  approx.value = approx.first_order * (1.0 + (a - b) * (a + b - 1.0) / (2.0 * z));
  return approx;
}

double exact_gamma_ratio(double z, double a, double b) {
  if (!(z + a > 0.0 && z + b > 0.0))
    throw ContractError("exact_gamma_ratio: z+a and z+b must be positive");
  return std::exp(std::lgamma(z + a) - std::lgamma(z + b));
}

RiemannSum riemann_right_sum(const std::function<double(double)>& f, std::int64_t n,
                             double deriv_sup) {
  if (n < 1) throw ContractError("riemann_right_sum: n must be >= 1");
  if (!(deriv_sup >= 0.0)) throw ContractError("riemann_right_sum: deriv_sup must be >= 0");
  CompensatedSum s;
  const double dn = static_cast<double>(n);
  for (std::int64_t i = 1; i <= n; ++i) s.add(f(static_cast<double>(i) / dn));
  return RiemannSum{s.value() / dn, deriv_sup / dn};
}

PhiLimitGaps phi_limit_gaps(const ScalingParams& scaling, std::int64_t n) {
  validate(scaling);
  if (n < 2) throw ContractError("phi_limit_gaps: n must be >= 2");
  const double al = scaling.alpha;
  const double theta = scaling.lambda * static_cast<double>(n);
  const double base = std::lgamma(theta + 1.0) - std::lgamma(theta + 1.0 + al);
  const auto phi_at = [&](std::int64_t i) {
    if (i == 1) return 1.0;
    const double di = static_cast<double>(i);
    return std::exp(std::lgamma(theta + di + al) - std::lgamma(theta + di) + base);
  };

  PhiLimitGaps gaps;
  const double phi_n = phi_at(n);
  gaps.phi_gap = std::abs(phi_n - std::pow(1.0 + 1.0 / scaling.lambda, al));

  CompensatedSum weighted;
  for (std::int64_t i = 1; i <= n; ++i)
    weighted.add(theta / ((theta + static_cast<double>(i)) * phi_at(i)));
  gaps.weighted_sum_gap =
      std::abs(phi_n / static_cast<double>(n) * weighted.value() - constants(scaling).m);
  return gaps;
}

}  // namespace crplab

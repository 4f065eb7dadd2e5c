#include "crplab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "crplab/asymptotics.hpp"
#include "crplab/numeric.hpp"

namespace crplab {

double normal_cdf(double x) {
  const double p = 0.5 * std::erfc(-x / std::sqrt(2.0));
  return std::clamp(p, 0.0, 1.0);
}

StandardizedSample standardize(std::span<const std::int64_t> samples,
                               const ScalingParams& scaling, std::int64_t n) {
  validate(scaling);
  if (n < 1) throw ContractError("standardize: n must be >= 1");
  if (samples.empty()) throw ContractError("standardize: empty sample");
  const Constants c = constants(scaling);
  const double s = std::sqrt(c.s2);
  const double root_n = std::sqrt(static_cast<double>(n));
  StandardizedSample out;
  out.n = n;
  out.scaling = scaling;
  out.values.reserve(samples.size());
  for (const std::int64_t k : samples)
    out.values.push_back(root_n * (static_cast<double>(k) / static_cast<double>(n) - c.m) / s);
  return out;
}

double ks_to_normal(const StandardizedSample& sample) {
  if (sample.values.empty()) throw ContractError("ks_to_normal: empty sample");
  std::vector<double> v(sample.values);
  std::sort(v.begin(), v.end());
  const double m = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = normal_cdf(v[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / m - f);
    d = std::max(d, f - static_cast<double>(i) / m);
  }
  return d;
}

namespace {

// Golden-section maximization of a unimodal |g| on [lo, hi].
template <typename G>
double golden_max(const G& g, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = std::abs(g(x1));
  double f2 = std::abs(g(x2));
  for (int iter = 0; iter < 80 && b - a > 1e-9; ++iter) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = std::abs(g(x2));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = std::abs(g(x1));
    }
  }
  return std::max(f1, f2);
}

}  // namespace

double shift_scale_normal_distance(double a, double b) {
  if (!(b > 0.0)) throw ContractError("shift_scale_normal_distance: b must be positive");
  const auto g = [&](double x) { return normal_cdf((x - a) / b) - normal_cdf(x); };

  // |g| -> 0 in both tails; the difference has at most two interior extrema.
  const double span = 10.0 * std::max(1.0, b) + std::abs(a);
  const double step = 1e-3;
  const std::int64_t grid = static_cast<std::int64_t>(std::ceil(2.0 * span / step));
  double best = 0.0;
  double prev2 = std::abs(g(-span));
  double prev1 = std::abs(g(-span + step));
  best = std::max(prev2, prev1);
  for (std::int64_t i = 2; i <= grid; ++i) {
    const double x = -span + step * static_cast<double>(i);
    const double cur = std::abs(g(x));
    best = std::max(best, cur);
    if (prev1 >= prev2 && prev1 >= cur) {
      // local maximum of |g| near x - step: refine its bracket
      best = std::max(best, golden_max(g, x - 2.0 * step, x));
    }
    prev2 = prev1;
    prev1 = cur;
  }
  return best;
}

double fit_rate(const KsReport& report) {
  const std::size_t m = report.n_values.size();
  if (m < 3 || report.ks.size() != m)
    throw ContractError("fit_rate: need >= 3 matching (n, ks) points");
  for (std::size_t i = 0; i < m; ++i) {
    if (report.n_values[i] < 1 || (i > 0 && report.n_values[i] <= report.n_values[i - 1]))
      throw ContractError("fit_rate: n values must be strictly increasing");
    if (!(report.ks[i] > 0.0)) throw ContractError("fit_rate: ks values must be positive");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += std::log(static_cast<double>(report.n_values[i]));
    my += std::log(report.ks[i]);
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(static_cast<double>(report.n_values[i])) - mx;
    sxy += dx * (std::log(report.ks[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double tv_distance(const KDistribution& p, std::span<const std::int64_t> q_empirical) {
  if (p.n < 1 || p.pmf.size() != static_cast<std::size_t>(p.n))
    throw ContractError("tv_distance: malformed distribution");
  if (q_empirical.empty()) throw ContractError("tv_distance: empty sample");
  std::vector<std::int64_t> freq(static_cast<std::size_t>(p.n), 0);
  for (const std::int64_t k : q_empirical) {
    if (k < 1 || k > p.n) throw ContractError("tv_distance: sample value outside 1..n");
    ++freq[static_cast<std::size_t>(k - 1)];
  }
  const double m = static_cast<double>(q_empirical.size());
  CompensatedSum s;
  for (std::size_t i = 0; i < p.pmf.size(); ++i)
    s.add(std::abs(p.pmf[i] - static_cast<double>(freq[i]) / m));
  return 0.5 * s.value();
}

}  // namespace crplab

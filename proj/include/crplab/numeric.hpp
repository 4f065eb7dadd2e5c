#pragma once

#include <cmath>
#include <cstdint>

namespace crplab {

// Neumaier compensated accumulator. Summation order still matters at the
// last ulp, so reducers that must not depend on the worker count feed it in
// a fixed index order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// log of the rising factorial x (x+a) (x+2a) ... (x+(m-1)a); empty product
// (m = 0) is 1. All factors must be positive.
inline double log_rising_factorial(double x, std::int64_t m, double a) {
  if (m <= 0) return 0.0;
  if (a == 1.0 && m > 64) return std::lgamma(x + static_cast<double>(m)) - std::lgamma(x);
  CompensatedSum s;
  for (std::int64_t i = 0; i < m; ++i) s.add(std::log(x + static_cast<double>(i) * a));
  return s.value();
}

}  // namespace crplab

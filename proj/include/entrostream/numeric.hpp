#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace entrostream {

// Kahan compensated accumulator; the oracles sum many near-cancelling terms.
class kahan_sum {
 public:
  void add(double x) {
    const double y = x - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Rounds a nonnegative parameter-formula value up to an integer count, at
// least 1. Counts must stay inside the exact integer range of a double.
inline std::uint64_t ceil_count(double value) {
  if (!std::isfinite(value) || value < 0.0)
    throw std::invalid_argument("ceil_count: formula produced a non-finite or negative value");
  if (value >= 9007199254740992.0)  // 2^53
    throw std::invalid_argument("ceil_count: formula produced a count too large to represent exactly");
  const double up = std::ceil(value);
  return up < 1.0 ? 1 : static_cast<std::uint64_t>(up);
}

}  // namespace entrostream

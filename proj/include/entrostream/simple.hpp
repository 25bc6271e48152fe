#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "entrostream/numeric.hpp"
#include "entrostream/result.hpp"
#include "entrostream/stream.hpp"

namespace entrostream {

// Parameters of the one-interval estimator.
struct simple_params {
  std::uint64_t window = 1;      // samples counted after each draw
  std::uint64_t iterations = 1;  // independent draw-and-count rounds
  std::size_t k = 1;
  double eps = 1.0;  // nats
};

// window = ceil(2k/eps), iterations = ceil(4 ln^2(1 + 2k/eps) / eps^2).
inline simple_params make_simple_params(std::size_t k, double eps) {
  if (k < 1 || !(eps > 0.0))
    throw std::invalid_argument("make_simple_params: need k >= 1 and eps > 0");
  const double ratio = 2.0 * static_cast<double>(k) / eps;
  const double log_term = std::log(1.0 + ratio);
  simple_params p;
  p.k = k;
  p.eps = eps;
  p.window = ceil_count(ratio);
  p.iterations = ceil_count(4.0 * log_term * log_term / (eps * eps));
  return p;
}

inline std::uint64_t predicted_worst_samples(const simple_params& p) {
  return p.iterations * (p.window + 1);
}

// One full run: draw a symbol, count it over a fresh window, accumulate
// ln(window/(count+1)), average over the rounds. Consumes exactly
// iterations * (window + 1) samples; every mutable variable lives in rf.
inline estimate_result run_simple(symbol_stream& stream, const simple_params& p,
                                  register_file& rf) {
  estimate_result out;
  const std::uint64_t before = stream.consumed();
  {
    reg sum(rf);
    reg round(rf);
    reg x(rf);
    reg value(rf);
    while (round.get() < static_cast<double>(p.iterations)) {
      x = static_cast<double>(stream.next());
      const std::uint64_t c =
          count_in_window(stream, static_cast<symbol>(x.get()), p.window, rf);
      value = std::log(static_cast<double>(p.window) / static_cast<double>(c + 1));
      sum += value.get();
      round += 1.0;
    }
    out.estimate = sum.get() / static_cast<double>(p.iterations);
  }
  out.samples_consumed = stream.consumed() - before;
  out.predicted_worst_samples = predicted_worst_samples(p);
  out.registers_high_water = rf.high_water();
  return out;
}

// Bias bound k / window on |E[estimate] - H(p)|.
inline double bias_bound(std::size_t k, std::uint64_t window) {
  return static_cast<double>(k) / static_cast<double>(window);
}

// Two-sided tail bound on the run mean straying mu from its expectation:
// min(1, 2 exp(-2 R mu^2 / ln^2(window + 1))). `window` is real-valued here
// because this is a formula evaluator, not a runner.
inline double concentration_bound(std::uint64_t iterations, double window, double mu) {
  const double width = std::log(window + 1.0);
  const double exponent =
      -2.0 * static_cast<double>(iterations) * mu * mu / (width * width);
  return std::min(1.0, 2.0 * std::exp(exponent));
}

}  // namespace entrostream

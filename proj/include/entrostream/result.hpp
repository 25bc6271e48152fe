#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace entrostream {

// What one estimator run reports besides the estimate itself.
struct estimate_result {
  double estimate = 0.0;                          // nats
  std::uint64_t samples_consumed = 0;             // realized stream draws
  std::uint64_t predicted_worst_samples = 0;      // bound implied by the parameters
  std::size_t registers_high_water = 0;           // from the run's register file
  std::vector<std::size_t> degenerate_intervals;  // 1-based bands whose hit count was zero
};

}  // namespace entrostream

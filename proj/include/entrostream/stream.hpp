#pragma once

#include <cstdint>

#include "entrostream/pmf.hpp"
#include "entrostream/registers.hpp"
#include "entrostream/rng.hpp"

namespace entrostream {

// Pull-based i.i.d. sample stream with an exact consumed-sample counter.
// Single owner: one trial, one stream; nothing is ever re-read.
class symbol_stream {
 public:
  symbol_stream(const pmf& source, random_source rng) : source_(&source), rng_(rng) {}

  symbol next() {
    ++consumed_;
    return source_->sample(rng_);
  }

  std::uint64_t consumed() const noexcept { return consumed_; }
  const pmf& source() const { return *source_; }

 private:
  const pmf* source_;
  random_source rng_;
  std::uint64_t consumed_ = 0;
};

// Draws exactly n fresh samples and reports how many equal x. The loop
// counter and the match counter live in the register file.
inline std::uint64_t count_in_window(symbol_stream& stream, symbol x, std::uint64_t n,
                                     register_file& rf) {
  reg drawn(rf);
  reg hits(rf);
  while (drawn.get() < static_cast<double>(n)) {
    if (stream.next() == x) hits += 1.0;
    drawn += 1.0;
  }
  return static_cast<std::uint64_t>(hits.get());
}

}  // namespace entrostream

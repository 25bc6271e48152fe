#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "entrostream/pmf.hpp"
#include "entrostream/registers.hpp"
#include "entrostream/stream.hpp"

using namespace entrostream;

namespace {

pmf uniform(std::size_t k) {
  return pmf(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

pmf dirac(std::size_t k) {
  std::vector<double> p(k, 0.0);
  p[0] = 1.0;
  return pmf(p);
}

// Test-only instrumented variant: tallies every symbol of one shared window
// so the per-symbol counts can be compared against the window length.
std::vector<std::uint64_t> count_all_in_window(symbol_stream& stream, std::size_t k,
                                               std::uint64_t n) {
  std::vector<std::uint64_t> counts(k, 0);
  for (std::uint64_t i = 0; i < n; ++i) ++counts[stream.next()];
  return counts;
}

}  // namespace

TEST_CASE("next draws one sample and counts it") {
  const pmf p = dirac(2);
  symbol_stream stream(p, random_source(1));
  for (int i = 0; i < 5; ++i) REQUIRE(stream.next() == 0);
  REQUIRE(stream.consumed() == 5);
}

TEST_CASE("consumed equals the number of calls exactly") {
  const pmf p = uniform(6);
  symbol_stream stream(p, random_source(9));
  for (int i = 0; i < 1234; ++i) stream.next();
  REQUIRE(stream.consumed() == 1234);
}

TEST_CASE("a fixed seed reproduces the stream") {
  const pmf p = uniform(16);
  symbol_stream a(p, random_source(77));
  symbol_stream b(p, random_source(77));
  for (int i = 0; i < 500; ++i) REQUIRE(a.next() == b.next());
}

TEST_CASE("count_in_window draws exactly n fresh samples") {
  const pmf p = dirac(3);
  symbol_stream stream(p, random_source(4));
  register_file rf(20);

  SECTION("n = 0 consumes nothing") {
    REQUIRE(count_in_window(stream, 0, 0, rf) == 0);
    REQUIRE(stream.consumed() == 0);
  }

  SECTION("point mass matches every sample") {
    REQUIRE(count_in_window(stream, 0, 7, rf) == 7);
    REQUIRE(stream.consumed() == 7);
  }

  SECTION("uses exactly two registers") {
    count_in_window(stream, 0, 10, rf);
    REQUIRE(rf.high_water() == 2);
    REQUIRE(rf.live() == 0);
  }
}

TEST_CASE("count_in_window concentrates around n p(x)") {
  const pmf p = uniform(2);
  symbol_stream stream(p, random_source(123));
  register_file rf(20);
  const std::uint64_t n = 100'000;
  const auto c = count_in_window(stream, 0, n, rf);
  REQUIRE(stream.consumed() == n);
  REQUIRE(std::llabs(static_cast<long long>(c) - 50'000) <= 700);  // 4-sigma-ish band
}

TEST_CASE("one window's per-symbol counts sum to the window length") {
  const pmf p(std::vector<double>{0.5, 0.3, 0.15, 0.05});
  symbol_stream stream(p, random_source(31));
  const std::uint64_t n = 10'000;
  const auto counts = count_all_in_window(stream, p.k(), n);
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  REQUIRE(total == n);
  REQUIRE(stream.consumed() == n);
}

TEST_CASE("register file enforces capacity and tracks the high-water mark") {
  register_file rf(20);

  SECTION("alloc beyond capacity raises capacity_exceeded") {
    std::vector<std::size_t> held;
    for (int i = 0; i < 20; ++i) held.push_back(rf.alloc());
    REQUIRE_THROWS_AS(rf.alloc(), capacity_exceeded);
    for (auto r : held) rf.free(r);
  }

  SECTION("high-water keeps the maximum simultaneously live count") {
    const auto a = rf.alloc();
    const auto b = rf.alloc();
    const auto c = rf.alloc();
    rf.free(b);
    const auto d = rf.alloc();
    REQUIRE(rf.high_water() == 3);
    REQUIRE(rf.live() == 3);
    rf.free(a);
    rf.free(c);
    rf.free(d);
    REQUIRE(rf.high_water() == 3);
    REQUIRE(rf.live() == 0);
  }

  SECTION("reads and writes require a live register") {
    const auto r = rf.alloc();
    rf.write(r, 2.5);
    REQUIRE(rf.read(r) == 2.5);
    rf.free(r);
    REQUIRE_THROWS_AS(rf.read(r), std::logic_error);
    REQUIRE_THROWS_AS(rf.write(r, 1.0), std::logic_error);
    REQUIRE_THROWS_AS(rf.free(r), std::logic_error);
  }
}

TEST_CASE("reg handles release their slot on scope exit") {
  register_file rf(4);
  {
    reg a(rf, 1.0);
    reg b(rf);
    b = 2.0;
    b += 0.5;
    REQUIRE(a.get() == 1.0);
    REQUIRE(b.get() == 2.5);
    REQUIRE(rf.live() == 2);
  }
  REQUIRE(rf.live() == 0);
  REQUIRE(rf.high_water() == 2);
}

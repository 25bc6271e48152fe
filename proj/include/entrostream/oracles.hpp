#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "entrostream/general.hpp"
#include "entrostream/numeric.hpp"
#include "entrostream/pmf.hpp"
#include "entrostream/registers.hpp"
#include "entrostream/rng.hpp"
#include "entrostream/stream.hpp"

namespace entrostream::oracles {

// Enumeration oracles stay desk-scale; larger requests error out rather than
// silently approximate.
class instance_too_large : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double enumeration_guard = 1e6;

// Exact Bin(n, p) point mass via log-factorials.
inline double binom_pmf(std::uint64_t n, double p, std::uint64_t c) {
  if (c > n) return 0.0;
  if (p <= 0.0) return c == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return c == n ? 1.0 : 0.0;
  const double nd = static_cast<double>(n);
  const double cd = static_cast<double>(c);
  const double log_choose =
      std::lgamma(nd + 1.0) - std::lgamma(cd + 1.0) - std::lgamma(nd - cd + 1.0);
  return std::exp(log_choose + cd * std::log(p) + (nd - cd) * std::log1p(-p));
}

// Pr[Bin(n, p) >= threshold] for a real threshold; the boundary is inclusive,
// matching the classifiers' comparison.
inline double binom_upper_tail(std::uint64_t n, double p, double threshold) {
  if (threshold <= 0.0) return 1.0;
  const double up = std::ceil(threshold);
  if (up > static_cast<double>(n)) return 0.0;
  kahan_sum tail;
  for (std::uint64_t c = static_cast<std::uint64_t>(up); c <= n; ++c)
    tail.add(binom_pmf(n, p, c));
  return std::min(1.0, tail.value());
}

// Closed form of E[1/(X+1)] for X ~ Bin(m, r): (1 - (1-r)^(m+1)) / (r (m+1)).
// r = 0 degenerates the formula; the limit value 1 is returned.
inline double binom_recip_expectation(std::uint64_t m, double r) {
  if (!(r >= 0.0 && r <= 1.0))
    throw std::domain_error("binom_recip_expectation: r must lie in [0, 1]");
  if (r == 0.0) return 1.0;
  const double md = static_cast<double>(m);
  return -std::expm1((md + 1.0) * std::log1p(-r)) / (r * (md + 1.0));
}

// Exact expectation of the one-interval estimator's per-round value:
// sum_x p(x) sum_c Bin(window, p(x))(c) ln(window / (c+1)).
inline double exact_mean_simple(const pmf& p, std::uint64_t window) {
  if (static_cast<double>(p.k()) * static_cast<double>(window) > enumeration_guard)
    throw instance_too_large("exact_mean_simple: k * window beyond the enumeration guard");
  kahan_sum total;
  for (std::size_t x = 0; x < p.k(); ++x) {
    const double px = p.prob(static_cast<symbol>(x));
    if (px == 0.0) continue;
    kahan_sum inner;
    for (std::uint64_t c = 0; c <= window; ++c)
      inner.add(binom_pmf(window, px, c) *
                std::log(static_cast<double>(window) / static_cast<double>(c + 1)));
    total.add(px * inner.value());
  }
  return total.value();
}

// Exact conditional law of a randomized band classifier:
// cond[x][j-1] = Pr[classifier(x) = band j]; rows sum to 1.
struct classifier_model {
  std::size_t bands = 0;
  std::vector<std::vector<double>> cond;

  void validate() const {
    for (const auto& row : cond) {
      if (row.size() != bands)
        throw std::invalid_argument("classifier_model: row width must equal the band count");
      kahan_sum s;
      for (double q : row) {
        if (!(q >= 0.0)) throw std::invalid_argument("classifier_model: negative probability");
        s.add(q);
      }
      if (std::fabs(s.value() - 1.0) > 1e-12)
        throw std::invalid_argument("classifier_model: rows must sum to 1 within 1e-12");
    }
  }
};

// Exact law of the two-band window classifier.
inline classifier_model exact_estint_probs(const pmf& p, std::uint64_t window, double split) {
  if (static_cast<double>(p.k()) * static_cast<double>(window) > enumeration_guard)
    throw instance_too_large("exact_estint_probs: k * window beyond the enumeration guard");
  classifier_model model;
  model.bands = 2;
  model.cond.resize(p.k());
  for (std::size_t x = 0; x < p.k(); ++x) {
    const double hit = binom_upper_tail(window, p.prob(static_cast<symbol>(x)),
                                        static_cast<double>(window) * split);
    model.cond[x] = {hit, 1.0 - hit};
  }
  return model;
}

// Exact law of the general prefix classifier over a partition: band i is hit
// iff its window test fires and every earlier one missed.
inline classifier_model exact_genestint_probs(const pmf& p, const interval_partition& part,
                                              std::span<const std::uint64_t> windows) {
  if (windows.size() + 1 < part.count)
    throw std::invalid_argument("exact_genestint_probs: need a window per interior band");
  double work = 0.0;
  for (std::size_t i = 1; i < part.count; ++i) work += static_cast<double>(windows[i - 1]);
  if (static_cast<double>(p.k()) * work > enumeration_guard)
    throw instance_too_large("exact_genestint_probs: instance beyond the enumeration guard");
  classifier_model model;
  model.bands = part.count;
  model.cond.assign(p.k(), std::vector<double>(part.count, 0.0));
  for (std::size_t x = 0; x < p.k(); ++x) {
    const double px = p.prob(static_cast<symbol>(x));
    double missed_all = 1.0;
    for (std::size_t i = 1; i < part.count; ++i) {
      const double hit = binom_upper_tail(windows[i - 1], px,
                                          static_cast<double>(windows[i - 1]) * part.lower(i));
      model.cond[x][i - 1] = missed_all * hit;
      missed_all *= 1.0 - hit;
    }
    model.cond[x][part.count - 1] = missed_all;
  }
  return model;
}

// Per-band conditional entropies and masses of the decomposition induced by
// a classifier; the recombination equals the exact entropy for any model.
struct decomposition {
  std::vector<double> masses;
  std::vector<double> per_band;   // meaningless where defined is false
  std::vector<bool> defined;      // false for zero-mass bands
  double recombined = 0.0;
};

inline decomposition decompose_entropy(const pmf& p, const classifier_model& model) {
  if (model.cond.size() != p.k())
    throw std::invalid_argument("decompose_entropy: model does not cover the support");
  model.validate();
  const std::size_t bands = model.bands;
  std::vector<kahan_sum> mass(bands);
  std::vector<kahan_sum> weighted(bands);
  for (std::size_t x = 0; x < p.k(); ++x) {
    const double px = p.prob(static_cast<symbol>(x));
    if (px == 0.0) continue;
    const double info = -std::log(px);
    for (std::size_t j = 0; j < bands; ++j) {
      mass[j].add(px * model.cond[x][j]);
      weighted[j].add(px * model.cond[x][j] * info);
    }
  }
  decomposition d;
  d.masses.resize(bands);
  d.per_band.assign(bands, 0.0);
  d.defined.assign(bands, false);
  kahan_sum recombined;
  for (std::size_t j = 0; j < bands; ++j) {
    d.masses[j] = mass[j].value();
    if (d.masses[j] > 0.0) {
      d.defined[j] = true;
      d.per_band[j] = weighted[j].value() / d.masses[j];
      recombined.add(d.masses[j] * d.per_band[j]);
    }
  }
  d.recombined = recombined.value();
  return d;
}

// Two-sided Hoeffding tail for the mean of m independent bounded variables.
inline double hoeffding_bound(std::uint64_t m,
                              std::span<const std::pair<double, double>> ranges, double t) {
  kahan_sum squared_widths;
  for (const auto& [a, b] : ranges) {
    if (b < a) throw std::invalid_argument("hoeffding_bound: range upper end below lower end");
    squared_widths.add((b - a) * (b - a));
  }
  if (squared_widths.value() == 0.0) return t > 0.0 ? 0.0 : 1.0;
  const double mt = static_cast<double>(m) * t;
  return std::min(1.0, 2.0 * std::exp(-2.0 * mt * mt / squared_widths.value()));
}

// Tail bound for the mean of a Bin(m, p)-sized batch of variables in [a, b]:
// Pr[|mean - E| >= t/p] <= 3 exp(-m t^2 / (8 p (b-a)^2)).
inline double random_hoeffding_bound(std::uint64_t m, double p, double t, double a, double b) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::domain_error("random_hoeffding_bound: need p in (0, 1]");
  if (!(b > a)) throw std::invalid_argument("random_hoeffding_bound: need b > a");
  return std::min(
      1.0, 3.0 * std::exp(-static_cast<double>(m) * t * t / (8.0 * p * (b - a) * (b - a))));
}

// Entropy of the empirical distribution of n fresh samples. Holds one count
// register per symbol, so its space grows linearly with k; this baseline is
// exempt from the constant-word budget by design.
inline double plug_in_estimate(symbol_stream& stream, std::uint64_t n, register_file& rf) {
  if (n < 1) throw std::invalid_argument("plug_in_estimate: need n >= 1");
  const std::size_t k = stream.source().k();
  reg_block counts(rf, k);
  reg drawn(rf);
  while (drawn.get() < static_cast<double>(n)) {
    const symbol x = stream.next();
    counts.write(x, counts.read(x) + 1.0);
    drawn += 1.0;
  }
  reg acc(rf);
  for (std::size_t x = 0; x < k; ++x) {
    const double c = counts.read(x);
    if (c > 0.0) acc += (c / static_cast<double>(n)) * std::log(static_cast<double>(n) / c);
  }
  return acc.get();
}

// Fraction of independent trials whose estimate lands within eps of the
// exact entropy. Trial i derives its generator from mix_seed(seed, i), so
// the rate is deterministic for a given seed.
template <typename TrialFn>
double monte_carlo_success(TrialFn&& run_trial, const pmf& p, double eps, std::size_t trials,
                           std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("monte_carlo_success: need at least one trial");
  const double truth = p.entropy();
  std::size_t successes = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    random_source rng(mix_seed(seed, i));
    const double estimate = run_trial(rng);
    if (std::fabs(estimate - truth) <= eps) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(trials);
}

}  // namespace entrostream::oracles

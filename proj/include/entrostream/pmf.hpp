#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "entrostream/numeric.hpp"
#include "entrostream/rng.hpp"

namespace entrostream {

using symbol = std::uint32_t;

// A k-ary probability mass function with exact entropy and O(1) sampling.
// Immutable after construction; safe to share across concurrent trials.
class pmf {
 public:
  explicit pmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("pmf: needs at least one entry");
    kahan_sum total;
    for (double p : probs_) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0)
        throw std::invalid_argument("pmf: entries must lie in [0, 1]");
      total.add(p);
    }
    if (std::fabs(total.value() - 1.0) > 1e-9)
      throw std::invalid_argument("pmf: entries must sum to 1 within 1e-9");
    build_alias();
  }

  std::size_t k() const { return probs_.size(); }
  double prob(symbol x) const { return probs_[x]; }
  const std::vector<double>& probs() const { return probs_; }

  // Shannon entropy in nats; zero entries contribute nothing.
  double entropy() const {
    kahan_sum h;
    for (double p : probs_)
      if (p > 0.0) h.add(-p * std::log(p));
    return h.value();
  }

  // One draw; a single uniform variate drives the alias table.
  symbol sample(random_source& rng) const {
    const double u = rng.next_double() * static_cast<double>(probs_.size());
    std::size_t j = static_cast<std::size_t>(u);
    if (j >= probs_.size()) j = probs_.size() - 1;
    return (u - static_cast<double>(j)) < alias_threshold_[j] ? static_cast<symbol>(j)
                                                              : alias_partner_[j];
  }

  // Exact masses of the bands delimited by strictly decreasing thresholds in
  // (0, 1]: band 1 is [t_1, 1], band j is [t_j, t_{j-1}), the last band is
  // [0, t_m). An empty threshold list yields the single band [0, 1].
  std::vector<double> interval_masses(const std::vector<double>& thresholds) const {
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      const bool in_range = thresholds[i] > 0.0 && thresholds[i] <= 1.0;
      const bool descending = i == 0 || thresholds[i] < thresholds[i - 1];
      if (!in_range || !descending)
        throw std::invalid_argument(
            "interval_masses: thresholds must be strictly decreasing within (0, 1]");
    }
    std::vector<kahan_sum> acc(thresholds.size() + 1);
    for (double p : probs_) {
      std::size_t j = 0;
      while (j < thresholds.size() && p < thresholds[j]) ++j;
      acc[j].add(p);
    }
    std::vector<double> masses(acc.size());
    for (std::size_t j = 0; j < acc.size(); ++j) masses[j] = acc[j].value();
    return masses;
  }

 private:
  // Vose's alias method.
  void build_alias() {
    const std::size_t n = probs_.size();
    alias_threshold_.assign(n, 1.0);
    alias_partner_.resize(n);
    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      alias_partner_[i] = static_cast<symbol>(i);
      scaled[i] = probs_[i] * static_cast<double>(n);
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      large.pop_back();
      alias_threshold_[s] = scaled[s];
      alias_partner_[s] = static_cast<symbol>(l);
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    // leftovers sit at 1 up to roundoff and keep themselves as partner
  }

  std::vector<double> probs_;
  std::vector<double> alias_threshold_;
  std::vector<symbol> alias_partner_;
};

enum class family { uniform, zipf, geometric, dirac, two_level, custom };

// A parameterized member of the test corpus of distributions.
struct family_spec {
  family kind = family::uniform;
  std::size_t k = 1;
  double zipf_exponent = 1.0;    // > 0
  double geometric_ratio = 0.5;  // in (0, 1)
  double head_mass = 1.0;        // two_level: total mass of the head block
  std::size_t head_count = 1;    // two_level: number of head symbols
  std::vector<double> custom_probs;
};

// Builds the pmf a spec describes; deterministic for a given spec. Custom
// probabilities must already be normalized (within 1e-6) and are rejected
// otherwise, never rescaled.
inline pmf materialize(const family_spec& spec) {
  if (spec.k < 1) throw std::invalid_argument("materialize: k must be at least 1");
  const std::size_t k = spec.k;
  const double kd = static_cast<double>(k);
  std::vector<double> probs(k, 0.0);
  switch (spec.kind) {
    case family::uniform: {
      for (auto& p : probs) p = 1.0 / kd;
      break;
    }
    case family::dirac: {
      probs[0] = 1.0;
      break;
    }
    case family::zipf: {
      if (!(spec.zipf_exponent > 0.0))
        throw std::invalid_argument("materialize: zipf exponent must be positive");
      kahan_sum z;
      for (std::size_t i = 0; i < k; ++i) {
        probs[i] = std::pow(static_cast<double>(i + 1), -spec.zipf_exponent);
        z.add(probs[i]);
      }
      for (auto& p : probs) p /= z.value();
      break;
    }
    case family::geometric: {
      if (!(spec.geometric_ratio > 0.0 && spec.geometric_ratio < 1.0))
        throw std::invalid_argument("materialize: geometric ratio must lie in (0, 1)");
      kahan_sum z;
      double term = 1.0;
      for (std::size_t i = 0; i < k; ++i) {
        probs[i] = term;
        z.add(term);
        term *= spec.geometric_ratio;
      }
      for (auto& p : probs) p /= z.value();
      break;
    }
    case family::two_level: {
      if (!(spec.head_mass > 0.0 && spec.head_mass <= 1.0))
        throw std::invalid_argument("materialize: two-level head mass must lie in (0, 1]");
      if (spec.head_count < 1 || spec.head_count > k)
        throw std::invalid_argument("materialize: two-level head count must lie in [1, k]");
      if (spec.head_count == k && std::fabs(spec.head_mass - 1.0) > 1e-12)
        throw std::invalid_argument(
            "materialize: head covers the whole alphabet, so its mass must be 1");
      const double head = spec.head_mass / static_cast<double>(spec.head_count);
      for (std::size_t i = 0; i < spec.head_count; ++i) probs[i] = head;
      if (spec.head_count < k) {
        const double tail = (1.0 - spec.head_mass) / static_cast<double>(k - spec.head_count);
        for (std::size_t i = spec.head_count; i < k; ++i) probs[i] = tail;
      }
      break;
    }
    case family::custom: {
      if (spec.custom_probs.size() != k)
        throw std::invalid_argument("materialize: custom probabilities must have k entries");
      kahan_sum z;
      for (double p : spec.custom_probs) {
        if (!std::isfinite(p) || p < 0.0)
          throw std::invalid_argument("materialize: custom probabilities must be nonnegative");
        z.add(p);
      }
      if (std::fabs(z.value() - 1.0) > 1e-6)
        throw std::invalid_argument(
            "materialize: custom probabilities must sum to 1 within 1e-6 (rejected, not rescaled)");
      probs = spec.custom_probs;
      break;
    }
  }
  return pmf(std::move(probs));
}

}  // namespace entrostream

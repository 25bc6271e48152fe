#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "entrostream/numeric.hpp"
#include "entrostream/result.hpp"
#include "entrostream/stream.hpp"

namespace entrostream {

// Parameters of the two-interval estimator: the split point between the two
// probability bands, the classifier window, and per-band window/iteration
// budgets.
struct two_interval_params {
  std::size_t k = 2;
  double eps = 1.0;
  double beta = 2.0;
  double gamma = 1.0;                              // always beta / 2
  double split = 0.5;                              // band boundary (log k)^beta / k
  std::uint64_t classifier_window = 1;             // equals windows[0]
  std::uint64_t mass_iterations = 1;               // equals iterations[0]
  std::array<std::uint64_t, 2> windows{1, 1};      // per-band count windows
  std::array<std::uint64_t, 2> iterations{1, 1};   // per-band round budgets
  double c1 = 1.0;
  double c2 = 1.0;

  // Band-2 contributions are clipped from below at this value.
  double clip_floor() const { return std::log(1.0 / (4.0 * split)); }
};

inline two_interval_params make_two_interval_params(std::size_t k, double eps, double beta,
                                                    double c1, double c2) {
  if (k < 2) throw std::invalid_argument("make_two_interval_params: need k >= 2");
  if (!(eps > 0.0) || !(beta > 0.0) || !(c1 > 0.0) || !(c2 > 0.0))
    throw std::invalid_argument(
        "make_two_interval_params: eps, beta, c1, c2 must be positive");
  const double kd = static_cast<double>(k);
  const double logk = std::log(kd);
  const double split = std::pow(logk, beta) / kd;
  if (!(split > 0.0 && split < 1.0))
    throw std::invalid_argument(
        "make_two_interval_params: split (log k)^beta / k falls outside (0, 1); lower beta");
  two_interval_params p;
  p.k = k;
  p.eps = eps;
  p.beta = beta;
  p.gamma = beta / 2.0;
  p.split = split;
  p.c1 = c1;
  p.c2 = c2;
  p.windows[0] = ceil_count(c1 * kd / (eps * std::pow(logk, p.gamma)));
  p.windows[1] = ceil_count(c1 * kd / eps);
  const double log_range_1 = std::log(kd / eps);
  const double log_range_2 = std::log(logk / eps);
  p.iterations[0] = ceil_count(c2 * log_range_1 * log_range_1 / (eps * eps));
  p.iterations[1] = ceil_count(c2 * log_range_2 * log_range_2 / (eps * eps));
  p.classifier_window = p.windows[0];
  p.mass_iterations = p.iterations[0];
  return p;
}

// Classifies x into band 1 or band 2 from one fresh window of samples:
// band 1 iff the count reaches window * split (boundary inclusive, compared
// as reals). Consumes exactly `window` samples.
inline std::size_t est_int(symbol_stream& stream, symbol x, std::uint64_t window, double split,
                           register_file& rf) {
  const std::uint64_t c = count_in_window(stream, x, window, rf);
  return static_cast<double>(c) >= static_cast<double>(window) * split ? 1 : 2;
}

// Fraction of fresh draws the classifier puts into band 1, on a grid of
// 1/iterations. Consumes exactly iterations * (window + 1) samples.
inline double est_prob_int(symbol_stream& stream, std::uint64_t window,
                           std::uint64_t iterations, double split, register_file& rf) {
  reg hits(rf);
  reg round(rf);
  reg x(rf);
  while (round.get() < static_cast<double>(iterations)) {
    x = static_cast<double>(stream.next());
    if (est_int(stream, static_cast<symbol>(x.get()), window, split, rf) == 1) hits += 1.0;
    round += 1.0;
  }
  return hits.get() / static_cast<double>(iterations);
}

struct cond_exp_result {
  std::array<double, 2> means{0.0, 0.0};         // conditional means; 0 when degenerate
  std::array<std::uint64_t, 2> hits{0, 0};       // classifier matches per band
  std::array<bool, 2> degenerate{false, false};  // band never matched
};

// One band's rounds: classify fresh draws, window-count the matches, and
// store the (possibly clipped) conditional mean and match count.
inline void cond_exp_band(symbol_stream& stream, const two_interval_params& p,
                          std::size_t band, register_file& rf, reg& mean_out,
                          reg& hits_out) {
  const double floor2 = p.clip_floor();
  reg acc(rf);
  reg matches(rf);
  reg round(rf);
  reg x(rf);
  while (round.get() < static_cast<double>(p.iterations[band - 1])) {
    x = static_cast<double>(stream.next());
    if (est_int(stream, static_cast<symbol>(x.get()), p.classifier_window, p.split, rf) ==
        band) {
      matches += 1.0;
      const std::uint64_t c = count_in_window(stream, static_cast<symbol>(x.get()),
                                              p.windows[band - 1], rf);
      double value = std::log(static_cast<double>(p.windows[band - 1]) /
                              static_cast<double>(c + 1));
      if (band == 2) value = std::max(value, floor2);
      acc += value;
    }
    round += 1.0;
  }
  hits_out = matches.get();
  mean_out = matches.get() > 0.0 ? acc.get() / matches.get() : 0.0;
}

// Conditional means of the per-draw log estimates, band 1 fully before
// band 2. Band-2 contributions are clipped from below at log(1/(4 split)).
// Band-1 results stay in the register file while band 2 runs.
inline cond_exp_result cond_exp(symbol_stream& stream, const two_interval_params& p,
                                register_file& rf) {
  cond_exp_result out;
  reg mean1(rf);
  reg hits1(rf);
  cond_exp_band(stream, p, 1, rf, mean1, hits1);
  reg mean2(rf);
  reg hits2(rf);
  cond_exp_band(stream, p, 2, rf, mean2, hits2);
  out.means = {mean1.get(), mean2.get()};
  out.hits = {static_cast<std::uint64_t>(hits1.get()),
              static_cast<std::uint64_t>(hits2.get())};
  for (std::size_t band = 0; band < 2; ++band)
    out.degenerate[band] = out.hits[band] == 0;
  return out;
}

inline std::uint64_t predicted_worst_samples(const two_interval_params& p) {
  std::uint64_t total = p.mass_iterations * (1 + p.classifier_window);
  for (std::size_t band = 0; band < 2; ++band)
    total += p.iterations[band] * (1 + p.classifier_window + p.windows[band]);
  return total;
}

// Full two-interval run: band-1 mass estimate, then the conditional means,
// then the convex combination of the two.
inline estimate_result run_two_interval(symbol_stream& stream, const two_interval_params& p,
                                        register_file& rf) {
  estimate_result out;
  const std::uint64_t before = stream.consumed();
  {
    reg mass1(rf);
    mass1 = est_prob_int(stream, p.classifier_window, p.mass_iterations, p.split, rf);
    const cond_exp_result cond = cond_exp(stream, p, rf);
    reg estimate(rf);
    estimate = mass1.get() * cond.means[0];
    estimate += (1.0 - mass1.get()) * cond.means[1];
    out.estimate = estimate.get();
    for (std::size_t band = 0; band < 2; ++band)
      if (cond.degenerate[band]) out.degenerate_intervals.push_back(band + 1);
  }
  out.samples_consumed = stream.consumed() - before;
  out.predicted_worst_samples = predicted_worst_samples(p);
  out.registers_high_water = rf.high_water();
  return out;
}

}  // namespace entrostream

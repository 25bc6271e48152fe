#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "entrostream/numeric.hpp"
#include "entrostream/result.hpp"
#include "entrostream/stream.hpp"

namespace entrostream {

// i-fold natural logarithm; iterlog(k, 0) = k.
inline double iterlog(double k, std::size_t i) {
  if (!(k > 0.0)) throw std::domain_error("iterlog: argument must be positive");
  double v = k;
  for (std::size_t step = 0; step < i; ++step) {
    if (!(v > 0.0)) throw std::domain_error("iterlog: intermediate value left the log domain");
    v = std::log(v);
  }
  return v;
}

// Least i with iterlog(k, i) <= 1.
inline std::size_t log_star(double k) {
  if (!(k >= 1.0)) throw std::invalid_argument("log_star: need k >= 1");
  std::size_t i = 0;
  double v = k;
  while (v > 1.0) {
    v = std::log(v);
    ++i;
  }
  return i;
}

// Raised when the requested boundaries cannot form a usable partition
// (beta too large for this alphabet size).
class vacuous_partition : public std::invalid_argument {
 public:
  explicit vacuous_partition(const std::string& what) : std::invalid_argument(what) {}
};

// Probability bands I_1..I_T delimited by 1 = b[0] > b[1] > ... > b[T] = 0,
// with I_i = [b[i], b[i-1]) and interior boundaries (iterlog(k, i))^beta / k.
struct interval_partition {
  std::size_t k = 1;
  double beta = 2.0;
  std::size_t count = 1;  // T
  std::vector<double> boundaries;

  double upper(std::size_t band) const { return boundaries[band - 1]; }
  double lower(std::size_t band) const { return boundaries[band]; }
};

inline interval_partition build_partition(std::size_t k, double beta) {
  if (k < 1) throw std::invalid_argument("build_partition: need k >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("build_partition: need beta > 0");
  interval_partition part;
  part.k = k;
  part.beta = beta;
  const double kd = static_cast<double>(k);
  std::size_t t = log_star(kd);
  if (t == 0) t = 1;  // k = 1: a single band covering [0, 1]
  part.count = t;
  part.boundaries.resize(t + 1);
  part.boundaries[0] = 1.0;
  part.boundaries[t] = 0.0;
  for (std::size_t i = 1; i < t; ++i)
    part.boundaries[i] = std::pow(iterlog(kd, i), beta) / kd;
  for (std::size_t i = 1; i <= t; ++i)
    if (!(part.boundaries[i] < part.boundaries[i - 1]))
      throw vacuous_partition(
          "build_partition: boundaries are not strictly decreasing inside (0, 1); lower beta");
  return part;
}

// Parameters of the general estimator: the partition plus per-band
// window/iteration budgets.
struct general_params {
  std::size_t k = 1;
  double eps = 1.0;
  double beta = 2.0;
  double gamma = 1.0;
  interval_partition partition;
  std::vector<std::uint64_t> windows;     // count windows per band
  std::vector<std::uint64_t> iterations;  // round budgets per band
  double cn = 1.0;
  double cr = 1.0;

  // Band contributions are clipped from below at log(1/(4 * upper boundary)).
  double clip_floor(std::size_t band) const {
    return std::log(1.0 / (4.0 * partition.upper(band)));
  }
};

inline general_params make_general_params(std::size_t k, double eps, double beta, double gamma,
                                          double cn, double cr) {
  if (!(eps > 0.0) || !(beta > 0.0) || !(gamma > 0.0) || !(cn > 0.0) || !(cr > 0.0))
    throw std::invalid_argument(
        "make_general_params: eps, beta, gamma, cn, cr must be positive");
  general_params p;
  p.k = k;
  p.eps = eps;
  p.beta = beta;
  p.gamma = gamma;
  p.cn = cn;
  p.cr = cr;
  p.partition = build_partition(k, beta);
  const std::size_t t = p.partition.count;
  const double kd = static_cast<double>(k);
  p.windows.resize(t);
  p.iterations.resize(t);
  for (std::size_t i = 1; i <= t; ++i) {
    if (i < t)
      p.windows[i - 1] = ceil_count(cn * kd / (eps * std::pow(iterlog(kd, i), gamma)));
    else
      p.windows[i - 1] = ceil_count(cn * kd / eps);
    const double log_range = std::log(iterlog(kd, i - 1) / eps);
    p.iterations[i - 1] = ceil_count(cr * log_range * log_range / (eps * eps));
  }
  return p;
}

// Runs the band tests 1..up_to in order, each on one fresh window; returns
// the first band whose count reaches windows[i-1] * lower(i) (boundary
// inclusive), else the last band. up_to must stay below the band count.
inline std::size_t gen_est_int(symbol_stream& stream, symbol x, const interval_partition& part,
                               std::span<const std::uint64_t> windows, std::size_t up_to,
                               register_file& rf) {
  if (up_to >= part.count)
    throw std::invalid_argument("gen_est_int: up_to must stay below the band count");
  if (windows.size() < up_to)
    throw std::invalid_argument("gen_est_int: window prefix shorter than up_to");
  for (std::size_t i = 1; i <= up_to; ++i) {
    const std::uint64_t c = count_in_window(stream, x, windows[i - 1], rf);
    if (static_cast<double>(c) >= static_cast<double>(windows[i - 1]) * part.lower(i))
      return i;
  }
  return part.count;
}

// Estimated masses of bands 1..T-1, each on its own round budget and its own
// prefix of the band tests. Earlier bands' results stay in the register file
// while later bands run.
inline std::vector<double> gen_est_prob_int(symbol_stream& stream, const general_params& p,
                                            register_file& rf) {
  const std::size_t t = p.partition.count;
  reg_block results(rf, t - 1);
  for (std::size_t band = 1; band < t; ++band) {
    reg hits(rf);
    reg round(rf);
    reg x(rf);
    while (round.get() < static_cast<double>(p.iterations[band - 1])) {
      x = static_cast<double>(stream.next());
      if (gen_est_int(stream, static_cast<symbol>(x.get()), p.partition,
                      std::span(p.windows).first(band), band, rf) == band)
        hits += 1.0;
      round += 1.0;
    }
    results.write(band - 1, hits.get() / static_cast<double>(p.iterations[band - 1]));
  }
  std::vector<double> masses(t - 1);
  for (std::size_t i = 0; i + 1 < t; ++i) masses[i] = results.read(i);
  return masses;
}

struct gen_cond_exp_result {
  std::vector<double> means;
  std::vector<std::uint64_t> hits;
  std::vector<std::size_t> degenerate;  // 1-based bands that never matched
};

// Conditional means of the clipped per-draw log estimates, one band at a
// time in order. Finished bands' results stay in the register file while the
// remaining bands run.
inline gen_cond_exp_result gen_cond_exp(symbol_stream& stream, const general_params& p,
                                        register_file& rf) {
  gen_cond_exp_result out;
  const std::size_t t = p.partition.count;
  out.means.assign(t, 0.0);
  out.hits.assign(t, 0);
  reg_block mean_cells(rf, t);
  reg_block hit_cells(rf, t);
  for (std::size_t band = 1; band <= t; ++band) {
    const std::size_t prefix = std::min(band, t - 1);
    const double floor_value = p.clip_floor(band);
    reg acc(rf);
    reg matches(rf);
    reg round(rf);
    reg x(rf);
    while (round.get() < static_cast<double>(p.iterations[band - 1])) {
      x = static_cast<double>(stream.next());
      if (gen_est_int(stream, static_cast<symbol>(x.get()), p.partition,
                      std::span(p.windows).first(prefix), prefix, rf) == band) {
        matches += 1.0;
        const std::uint64_t c = count_in_window(stream, static_cast<symbol>(x.get()),
                                                p.windows[band - 1], rf);
        double value = std::log(static_cast<double>(p.windows[band - 1]) /
                                static_cast<double>(c + 1));
        value = std::max(value, floor_value);
        acc += value;
      }
      round += 1.0;
    }
    hit_cells.write(band - 1, matches.get());
    mean_cells.write(band - 1,
                     matches.get() > 0.0 ? acc.get() / matches.get() : 0.0);
  }
  for (std::size_t band = 1; band <= t; ++band) {
    out.hits[band - 1] = static_cast<std::uint64_t>(hit_cells.read(band - 1));
    out.means[band - 1] = mean_cells.read(band - 1);
    if (out.hits[band - 1] == 0) out.degenerate.push_back(band);
  }
  return out;
}

inline std::uint64_t predicted_worst_samples(const general_params& p) {
  const std::size_t t = p.partition.count;
  std::vector<std::uint64_t> prefix_sum(t + 1, 0);
  for (std::size_t i = 1; i <= t; ++i) prefix_sum[i] = prefix_sum[i - 1] + p.windows[i - 1];
  std::uint64_t total = 0;
  for (std::size_t band = 1; band < t; ++band)
    total += p.iterations[band - 1] * (1 + prefix_sum[band]);
  for (std::size_t band = 1; band <= t; ++band)
    total += p.iterations[band - 1] *
             (1 + prefix_sum[std::min(band, t - 1)] + p.windows[band - 1]);
  return total;
}

// Full general run. Each band runs its mass phase and then its mean phase,
// folding the product into a running combination, so no more than one band's
// results are ever held at once.
inline estimate_result run_general(symbol_stream& stream, const general_params& p,
                                   register_file& rf) {
  estimate_result out;
  const std::uint64_t before = stream.consumed();
  const std::size_t t = p.partition.count;
  {
    reg combined(rf);
    reg mass_seen(rf);
    for (std::size_t band = 1; band <= t; ++band) {
      reg weight(rf);
      if (band < t) {
        reg hits(rf);
        reg round(rf);
        reg x(rf);
        while (round.get() < static_cast<double>(p.iterations[band - 1])) {
          x = static_cast<double>(stream.next());
          if (gen_est_int(stream, static_cast<symbol>(x.get()), p.partition,
                          std::span(p.windows).first(band), band, rf) == band)
            hits += 1.0;
          round += 1.0;
        }
        weight = hits.get() / static_cast<double>(p.iterations[band - 1]);
      } else {
        weight = 1.0 - mass_seen.get();
      }
      const std::size_t prefix = std::min(band, t - 1);
      const double floor_value = p.clip_floor(band);
      bool matched = false;
      {
        reg acc(rf);
        reg matches(rf);
        reg round(rf);
        reg x(rf);
        while (round.get() < static_cast<double>(p.iterations[band - 1])) {
          x = static_cast<double>(stream.next());
          if (gen_est_int(stream, static_cast<symbol>(x.get()), p.partition,
                          std::span(p.windows).first(prefix), prefix, rf) == band) {
            matches += 1.0;
            const std::uint64_t c = count_in_window(stream, static_cast<symbol>(x.get()),
                                                    p.windows[band - 1], rf);
            double value = std::log(static_cast<double>(p.windows[band - 1]) /
                                    static_cast<double>(c + 1));
            value = std::max(value, floor_value);
            acc += value;
          }
          round += 1.0;
        }
        matched = matches.get() > 0.0;
        combined += weight.get() * (matched ? acc.get() / matches.get() : 0.0);
      }
      if (!matched) out.degenerate_intervals.push_back(band);
      if (band < t) mass_seen += weight.get();
    }
    out.estimate = combined.get();
  }
  out.samples_consumed = stream.consumed() - before;
  out.predicted_worst_samples = predicted_worst_samples(p);
  out.registers_high_water = rf.high_water();
  return out;
}

// One analysis constraint with its computed threshold.
struct constraint_check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool satisfied = false;
};

// Evaluates the constant constraints the analysis imposes on the general
// estimator's parameters.
inline std::vector<constraint_check> theory_constant_check(double beta, double gamma, double cn,
                                                           double cr, double ct) {
  std::vector<constraint_check> checks;
  checks.push_back({"beta > 16", beta, 16.0, beta > 16.0});
  checks.push_back(
      {"gamma = beta/2", gamma, beta / 2.0, std::fabs(gamma - beta / 2.0) <= 1e-12});
  checks.push_back({"C_N > 36", cn, 36.0, cn > 36.0});
  checks.push_back({"C_N > 108*beta", cn, 108.0 * beta, cn > 108.0 * beta});
  checks.push_back({"C_T >= 30", ct, 30.0, ct >= 30.0});
  const double cr_floor = 6.0 * ct * ct * std::pow(beta + 1.0, 2.5);
  checks.push_back({"C_R >= 6*C_T^2*(beta+1)^(5/2)", cr, cr_floor, cr >= cr_floor});
  return checks;
}

}  // namespace entrostream

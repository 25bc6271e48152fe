// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "entrostream/entrostream.hpp"

using namespace entrostream;

namespace {

struct outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) { return format_real(v); }

family_spec named_family(const std::string& text, std::size_t k) {
  return parse_family(text, k);
}

std::vector<family_spec> bias_families(std::size_t k) {
  std::vector<family_spec> out;
  out.push_back(named_family("uniform", k));
  out.push_back(named_family("zipf:1", k));
  family_spec two;
  two.kind = family::two_level;
  two.k = k;
  two.head_count = std::max<std::size_t>(1, k / 4);
  two.head_mass = two.head_count == k ? 1.0 : 0.75;
  out.push_back(two);
  return out;
}

// 1. Reciprocal-moment closed form vs brute-force summation, plus the inequality.
outcome criterion_binomial_reciprocal() {
  outcome out;
  double worst = 0.0;
  for (std::uint64_t m = 0; m <= 30; ++m) {
    for (int ri = 1; ri <= 99; ++ri) {
      const double r = ri / 100.0;
      kahan_sum brute;
      for (std::uint64_t l = 0; l <= m; ++l)
        brute.add(oracles::binom_pmf(m, r, l) / static_cast<double>(l + 1));
      const double closed = oracles::binom_recip_expectation(m, r);
      worst = std::max(worst, std::fabs(closed - brute.value()));
      if (closed > 1.0 / (r * static_cast<double>(m + 1)) + 1e-15) {
        out.pass = false;
        out.detail = "inequality violated at m=" + std::to_string(m) + " r=" + fmt(r);
        return out;
      }
    }
  }
  out.pass = worst <= 1e-12;
  out.detail = "max |closed - brute| = " + fmt(worst);
  return out;
}

// 2. Bias bracket with strictness: 0 < H(p) - E[estimate] <= k/N.
outcome criterion_exact_bias() {
  outcome out;
  double smallest_gap = 1.0;
  double worst_excess = 0.0;
  for (std::size_t k = 1; k <= 8; ++k) {
    for (const auto& spec : bias_families(k)) {
      const pmf p = materialize(spec);
      for (std::uint64_t window : {2ull, 8ull, 32ull, 64ull}) {
        const double gap = p.entropy() - oracles::exact_mean_simple(p, window);
        const double bound = static_cast<double>(k) / static_cast<double>(window);
        smallest_gap = std::min(smallest_gap, gap);
        worst_excess = std::max(worst_excess, gap - bound);
        if (!(gap > 0.0 && gap <= bound)) {
          out.pass = false;
          out.detail = "violated at k=" + std::to_string(k) + " family=" +
                       family_to_string(spec) + " N=" + std::to_string(window) +
                       " gap=" + fmt(gap);
          return out;
        }
      }
    }
  }
  out.detail = "min gap = " + fmt(smallest_gap) + ", max gap-bound = " + fmt(worst_excess);
  return out;
}

// 3. Decomposition identity for randomized models and the exact window classifier.
outcome criterion_decomposition() {
  outcome out;
  double worst = 0.0;
  random_source rng(31415926);
  for (int round = 0; round < 100; ++round) {
    const std::size_t k = 1 + static_cast<std::size_t>(rng.next_u64() % 10);
    const std::size_t bands = 1 + static_cast<std::size_t>(rng.next_u64() % 4);
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& v : w) {
      v = rng.next_double() + 1e-9;
      total += v;
    }
    for (auto& v : w) v /= total;
    const pmf p(w);
    oracles::classifier_model model;
    model.bands = bands;
    model.cond.assign(k, std::vector<double>(bands, 0.0));
    for (auto& row : model.cond) {
      double row_total = 0.0;
      for (auto& q : row) {
        q = rng.next_double() + 1e-9;
        row_total += q;
      }
      double partial = 0.0;
      for (std::size_t j = 0; j + 1 < bands; ++j) {
        row[j] /= row_total;
        partial += row[j];
      }
      row[bands - 1] = 1.0 - partial;
    }
    worst = std::max(worst,
                     std::fabs(oracles::decompose_entropy(p, model).recombined - p.entropy()));
  }
  for (std::uint64_t window : {1ull, 2ull}) {
    for (const auto& probs :
         {std::vector<double>{0.9, 0.1}, std::vector<double>{0.5, 0.3, 0.2}}) {
      const pmf p(probs);
      const auto d = oracles::decompose_entropy(p, oracles::exact_estint_probs(p, window, 0.5));
      worst = std::max(worst, std::fabs(d.recombined - p.entropy()));
    }
  }
  out.pass = worst <= 1e-12;
  out.detail = "max |recombined - H| = " + fmt(worst);
  return out;
}

// 4. Success guarantee of the simple estimator at its designed parameters.
outcome criterion_designed_guarantee() {
  outcome out;
  const auto params = make_simple_params(8, 0.25);
  if (params.window != 64 || params.iterations != 1116 ||
      predicted_worst_samples(params) != 72540) {
    out.pass = false;
    out.detail = "unexpected designed parameters";
    return out;
  }
  std::ostringstream detail;
  for (const char* fam : {"uniform", "zipf:1"}) {
    run_config cfg;
    cfg.family = named_family(fam, 8);
    cfg.estimator = estimator_kind::simple;
    cfg.eps = 0.25;
    cfg.trials = 200;
    cfg.seed = 20250810;
    cfg.workers = 2;
    const auto report = run_trials(cfg);
    detail << fam << " rate=" << fmt(report.success_rate) << " ";
    if (report.success_rate < 2.0 / 3.0) out.pass = false;
    if (report.mean_samples != 72540.0) {
      out.pass = false;
      detail << "(sample count drifted) ";
    }
  }
  out.detail = detail.str() + "(target >= 2/3, 72540 samples per trial)";
  return out;
}

// 5. Word-count claims: constant for the estimators, linear for plug-in.
outcome criterion_memory() {
  outcome out;
  std::size_t worst = 0;
  for (const char* est : {"simple", "two-interval", "general"}) {
    for (std::size_t k : {8, 64, 1000}) {
      for (const char* fam : {"uniform", "zipf:1"}) {
        run_config cfg;
        cfg.family = named_family(fam, k);
        cfg.estimator = parse_estimator(est);
        cfg.eps = 0.5;
        cfg.trials = 3;
        cfg.seed = 7;
        const auto report = run_trials(cfg);
        worst = std::max(worst, report.max_registers);
        if (report.max_registers > 20 || report.failed_trials > 0) {
          out.pass = false;
          out.detail = std::string(est) + " at k=" + std::to_string(k) + " used " +
                       std::to_string(report.max_registers) + " words";
          return out;
        }
      }
    }
  }
  run_config plug;
  plug.family = named_family("uniform", 64);
  plug.estimator = estimator_kind::plug_in;
  plug.eps = 0.5;
  plug.trials = 1;
  plug.seed = 7;
  const auto plug_report = run_trials(plug);
  if (plug_report.max_registers <= 20) {
    out.pass = false;
    out.detail = "plug-in stayed within 20 words at k=64";
    return out;
  }
  out.detail = "estimator max high-water = " + std::to_string(worst) +
               ", plug-in high-water = " + std::to_string(plug_report.max_registers);
  return out;
}

// 6. Exact sample accounting, no tolerance.
outcome criterion_sample_accounting() {
  outcome out;
  for (std::size_t k : {4, 8, 64}) {
    const pmf p = materialize(named_family("zipf:1", k));
    const auto sp = make_simple_params(k, 0.5);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      symbol_stream stream(p, random_source(mix_seed(100, seed)));
      register_file rf(20);
      const auto res = run_simple(stream, sp, rf);
      if (res.samples_consumed != sp.iterations * (sp.window + 1)) {
        out.pass = false;
        out.detail = "simple consumption drifted at k=" + std::to_string(k);
        return out;
      }
    }
    const auto tp = make_two_interval_params(k, 0.5, 2.0, 1.0, 1.0);
    const std::uint64_t worst_formula =
        tp.mass_iterations * tp.classifier_window +
        tp.iterations[0] * (tp.classifier_window + tp.windows[0]) +
        tp.iterations[1] * (tp.classifier_window + tp.windows[1]) +
        (tp.mass_iterations + tp.iterations[0] + tp.iterations[1]);
    if (worst_formula != predicted_worst_samples(tp)) {
      out.pass = false;
      out.detail = "worst-case formula mismatch";
      return out;
    }
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      symbol_stream stream(p, random_source(mix_seed(200, seed)));
      register_file rf(20);
      const auto res = run_two_interval(stream, tp, rf);
      if (res.samples_consumed > worst_formula) {
        out.pass = false;
        out.detail = "two-interval consumption exceeded the worst case at k=" +
                     std::to_string(k);
        return out;
      }
    }
  }
  out.detail = "simple == R(N+1); two-interval <= NR + R1(N+N1) + R2(N+N2) + (R+R1+R2)";
  return out;
}

// 7. Iterated-log growth bound and partition sanity.
outcome criterion_iterlog() {
  outcome out;
  for (std::size_t k : {4, 16, 256, 1024, 1000000}) {
    const double kd = static_cast<double>(k);
    const auto part = build_partition(k, 2.0);
    const std::size_t t = part.count;
    for (std::size_t i = 1; i <= t; ++i) {
      if (iterlog(kd, t - i) < std::exp(static_cast<double>(i - 1)) - 1e-12) {
        out.pass = false;
        out.detail = "growth bound failed at k=" + std::to_string(k) +
                     " i=" + std::to_string(i);
        return out;
      }
    }
    for (std::size_t i = 1; i < part.boundaries.size(); ++i) {
      if (!(part.boundaries[i] < part.boundaries[i - 1])) {
        out.pass = false;
        out.detail = "boundaries not strictly decreasing at k=" + std::to_string(k);
        return out;
      }
    }
    if (!(part.boundaries[t - 1] < std::exp(2.0) / kd)) {
      out.pass = false;
      out.detail = "last positive boundary too large at k=" + std::to_string(k);
      return out;
    }
  }
  out.detail = "k in {4, 16, 256, 1024, 1e6}, beta = 2";
  return out;
}

// 8. Random Hoeffding bound against a 10,000-repetition Monte Carlo.
outcome criterion_random_hoeffding() {
  outcome out;
  std::ostringstream detail;
  int nontrivial = 0;
  std::uint64_t cell = 0;
  for (std::uint64_t m : {100ull, 800ull}) {
    for (double p : {0.1, 0.5, 1.0}) {
      for (double t : {0.05, 0.1}) {
        ++cell;
        const double bound = oracles::random_hoeffding_bound(m, p, t, 0.0, 1.0);
        const int reps = 10000;
        int violations = 0;
        for (int rep = 0; rep < reps; ++rep) {
          random_source rng(
              mix_seed(987654, cell * 100000 + static_cast<std::uint64_t>(rep)));
          std::uint64_t batch = 0;
          for (std::uint64_t i = 0; i < m; ++i)
            if (rng.next_double() < p) ++batch;
          if (batch == 0) continue;  // empty batch: no deviation event
          kahan_sum total;
          for (std::uint64_t i = 0; i < batch; ++i) total.add(rng.next_double());
          if (std::fabs(total.value() / static_cast<double>(batch) - 0.5) >= t / p)
            ++violations;
        }
        const double freq = static_cast<double>(violations) / reps;
        const double capped = std::min(bound, 1.0);
        const double slack = 4.0 * std::sqrt(capped * (1.0 - capped) / reps);
        if (capped < 1.0) ++nontrivial;
        if (freq > capped + slack) {
          out.pass = false;
          out.detail = "violated at m=" + std::to_string(m) + " p=" + fmt(p) +
                       " t=" + fmt(t) + ": freq " + fmt(freq) + " > bound " + fmt(capped);
          return out;
        }
      }
    }
  }
  out.detail = "12 grid cells, " + std::to_string(nontrivial) + " with a nontrivial bound";
  return out;
}

// 9. Practical-mode guarantee form for the interval estimators.
outcome criterion_practical_guarantee() {
  outcome out;
  std::ostringstream detail;
  for (const char* est : {"two-interval", "general"}) {
    for (std::size_t k : {64, 1000}) {
      for (const char* fam : {"uniform", "zipf:1", "two-level"}) {
        run_config cfg;
        if (std::string(fam) == "two-level")
          cfg.family = named_family("two-level:0.9," + std::to_string(k / 8), k);
        else
          cfg.family = named_family(fam, k);
        cfg.estimator = parse_estimator(est);
        cfg.eps = 0.5;
        cfg.trials = 200;
        cfg.seed = 424243;
        cfg.workers = 2;
        const auto report = run_trials(cfg);
        if (report.success_rate < 2.0 / 3.0) {
          out.pass = false;
          detail << "[FAILED " << est << " k=" << k << " " << fam
                 << " rate=" << fmt(report.success_rate) << "] ";
        }
      }
    }
  }
  out.detail = detail.str().empty() ? "all 12 cells at success >= 2/3 (eps = 0.5, beta = 2)"
                                    : detail.str();
  return out;
}

// 10. Constant-constraint checker arithmetic.
outcome criterion_constant_checker() {
  outcome out;
  const double beta = 17.0;
  const double ct = 30.0;
  const double cr = 6.0 * ct * ct * std::pow(beta + 1.0, 2.5);
  for (const auto& check : theory_constant_check(beta, 8.5, 2000.0, cr, ct)) {
    if (!check.satisfied) {
      out.pass = false;
      out.detail = "expected PASS for " + check.name;
      return out;
    }
  }
  const auto practical = theory_constant_check(2.0, 1.0, 1.0, 1.0, 30.0);
  bool beta_flagged = false;
  for (const auto& check : practical)
    if (check.name == "beta > 16" && !check.satisfied) beta_flagged = true;
  if (!beta_flagged) {
    out.pass = false;
    out.detail = "beta = 2 was not flagged";
    return out;
  }
  out.detail = "theory constants PASS at beta=17; beta=2 flagged as practical";
  return out;
}

// 11. Structural T = 2 reduction, bit-exact under shared seeds.
outcome criterion_t2_reduction() {
  outcome out;
  for (std::size_t k : {5, 12}) {
    const pmf p = materialize(named_family("zipf:1", k));
    const auto two = make_two_interval_params(k, 0.5, 2.0, 1.0, 1.0);
    const auto gen = make_general_params(k, 0.5, 2.0, 1.0, 1.0, 1.0);
    if (gen.partition.count != 2) {
      out.pass = false;
      out.detail = "log* " + std::to_string(k) + " is not 2";
      return out;
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      symbol_stream sa(p, random_source(mix_seed(2024, seed)));
      symbol_stream sb(p, random_source(mix_seed(2024, seed)));
      register_file ra(20), rb(20);
      const auto a = run_two_interval(sa, two, ra);
      const auto b = run_general(sb, gen, rb);
      const bool equal = a.estimate == b.estimate &&
                         a.samples_consumed == b.samples_consumed &&
                         a.predicted_worst_samples == b.predicted_worst_samples &&
                         a.degenerate_intervals == b.degenerate_intervals;
      if (!equal) {
        out.pass = false;
        out.detail = "trace diverged at k=" + std::to_string(k) +
                     " seed=" + std::to_string(seed) + " (two=" + fmt(a.estimate) +
                     " gen=" + fmt(b.estimate) + ")";
        return out;
      }
    }
  }
  out.detail = "40 shared-seed runs identical (estimate, consumption, flags)";
  return out;
}

struct criterion {
  int number;
  const char* name;
  std::function<outcome()> run;
  double time_limit_s;  // 0 = no stated limit
};

}  // namespace

int main() {
  const std::vector<criterion> criteria = {
      {1, "binomial-reciprocal oracle (closed form vs brute force)",
       criterion_binomial_reciprocal, 1.0},
      {2, "exact bias bracket 0 < H - E <= k/N", criterion_exact_bias, 10.0},
      {3, "entropy decomposition identity", criterion_decomposition, 5.0},
      {4, "simple-estimator guarantee at (k=8, eps=0.25)", criterion_designed_guarantee, 60.0},
      {5, "20-word memory claim vs linear plug-in", criterion_memory, 0.0},
      {6, "exact sample accounting", criterion_sample_accounting, 0.0},
      {7, "iterated-log growth bound and partition shape", criterion_iterlog, 0.0},
      {8, "random Hoeffding bound vs Monte Carlo", criterion_random_hoeffding, 60.0},
      {9, "practical-mode interval-estimator guarantee", criterion_practical_guarantee, 0.0},
      {10, "theory constant-constraint checker", criterion_constant_checker, 0.0},
      {11, "T = 2 structural reduction, trace-exact", criterion_t2_reduction, 0.0},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    outcome result;
    try {
      result = c.run();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0.0 && elapsed >= c.time_limit_s) {
      result.pass = false;
      result.detail += " [over the " + format_real(c.time_limit_s) + " s budget]";
    }
    std::printf("%s  criterion %2d: %s (%s; %.2f s)\n", result.pass ? "PASS" : "FAIL",
                c.number, c.name, result.detail.c_str(), elapsed);
    std::fflush(stdout);
    if (!result.pass) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}

// Command-line front end: parameter tables, estimation runs, verification
// suites, and sweep experiments with machine-readable reports.

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entrostream/entrostream.hpp"

using namespace entrostream;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_suite_failure = 1;
constexpr int exit_config_error = 2;

struct cli_flags {
  std::string config_path;
  std::size_t k = 0;
  double eps = 0.0;
  std::string family;
  std::string estimator;
  double beta = 0.0, gamma = 0.0, c1 = 0.0, c2 = 0.0, cn = 0.0, cr = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string mode;
  std::string out;
  std::size_t workers = 0;
  std::string units;
};

void add_common_flags(CLI::App* cmd, cli_flags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
  cmd->add_option("--k", f.k, "alphabet size");
  cmd->add_option("--eps", f.eps, "accuracy target in nats");
  cmd->add_option("--family", f.family,
                  "distribution family: uniform | dirac | zipf:<s> | geometric:<r> | "
                  "two-level:<mass>,<count> | custom:<p1>,<p2>,...");
  cmd->add_option("--estimator", f.estimator, "simple | two-interval | general | plug-in");
  cmd->add_option("--beta", f.beta, "interval exponent");
  cmd->add_option("--gamma", f.gamma, "window exponent (general estimator)");
  cmd->add_option("--c1", f.c1, "two-interval window constant");
  cmd->add_option("--c2", f.c2, "two-interval iteration constant");
  cmd->add_option("--cn", f.cn, "general window constant");
  cmd->add_option("--cr", f.cr, "general iteration constant");
  cmd->add_option("--trials", f.trials, "number of independent trials");
  cmd->add_option("--seed", f.seed, "base seed; trial i uses mix_seed(seed, i)");
  cmd->add_option("--mode", f.mode, "practical | theory-print");
  cmd->add_option("--out", f.out, "output path (stdout when omitted)");
  cmd->add_option("--workers", f.workers, "concurrent trial workers");
  cmd->add_option("--units", f.units, "nats | bits (display conversion only)");
}

run_config build_config(const CLI::App* cmd, const cli_flags& f) {
  run_config cfg;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw std::invalid_argument("cannot read config file '" + f.config_path + "'");
    nlohmann::json j;
    in >> j;
    cfg = config_from_json(j);
  }
  if (cmd->count("--k")) cfg.family.k = f.k;
  if (cmd->count("--family")) cfg.family = parse_family(f.family, cfg.family.k);
  if (cmd->count("--estimator")) cfg.estimator = parse_estimator(f.estimator);
  if (cmd->count("--eps")) cfg.eps = f.eps;
  if (cmd->count("--mode")) cfg.mode = parse_mode(f.mode);
  if (cmd->count("--beta")) cfg.constants.beta = f.beta;
  if (cmd->count("--gamma")) cfg.constants.gamma = f.gamma;
  if (cmd->count("--c1")) cfg.constants.c1 = f.c1;
  if (cmd->count("--c2")) cfg.constants.c2 = f.c2;
  if (cmd->count("--cn")) cfg.constants.cn = f.cn;
  if (cmd->count("--cr")) cfg.constants.cr = f.cr;
  if (cmd->count("--trials")) cfg.trials = f.trials;
  if (cmd->count("--seed")) cfg.seed = f.seed;
  if (cmd->count("--out")) cfg.out = f.out;
  if (cmd->count("--workers")) cfg.workers = f.workers;
  if (cmd->count("--units")) {
    if (f.units != "nats" && f.units != "bits")
      throw std::invalid_argument("--units must be nats or bits");
    cfg.bits_display = f.units == "bits";
  }
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be at least 1");
  return cfg;
}

double display_entropy(double nats, bool bits) { return bits ? nats / std::log(2.0) : nats; }
const char* unit_label(bool bits) { return bits ? "bits" : "nats"; }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) parts.push_back(part);
  return parts;
}

// ---------------------------------------------------------------- params --

int cmd_params(const CLI::App* cmd, const cli_flags& f) {
  run_config cfg = build_config(cmd, f);
  const auto& c = cfg.constants;
  std::printf("estimator: %s   k = %zu   eps = %s nats\n", estimator_name(cfg.estimator),
              cfg.family.k, format_real(cfg.eps).c_str());
  if (cfg.mode == run_mode::theory_print) {
    std::printf("theory constants check (beta=%s gamma=%s C_N=%s C_R=%s C_T=%s):\n",
                format_real(c.beta).c_str(), format_real(c.gamma).c_str(),
                format_real(c.cn).c_str(), format_real(c.cr).c_str(),
                format_real(c.ct).c_str());
    for (const auto& check : theory_constant_check(c.beta, c.gamma, c.cn, c.cr, c.ct))
      std::printf("  %-28s %-4s  value = %s  threshold = %s\n", check.name.c_str(),
                  check.satisfied ? "PASS" : "FAIL", format_real(check.value).c_str(),
                  format_real(check.threshold).c_str());
  }
  try {
    switch (cfg.estimator) {
      case estimator_kind::simple: {
        const auto p = make_simple_params(cfg.family.k, cfg.eps);
        std::printf("  window N        = %llu\n", (unsigned long long)p.window);
        std::printf("  iterations R    = %llu\n", (unsigned long long)p.iterations);
        std::printf("  worst-case samples = %llu\n",
                    (unsigned long long)predicted_worst_samples(p));
        break;
      }
      case estimator_kind::two_interval: {
        const auto p = make_two_interval_params(cfg.family.k, cfg.eps, c.beta, c.c1, c.c2);
        std::printf("  beta = %s   gamma = %s   split = %s\n", format_real(p.beta).c_str(),
                    format_real(p.gamma).c_str(), format_real(p.split).c_str());
        for (int i = 0; i < 2; ++i)
          std::printf("  band %d: N_%d = %llu   R_%d = %llu\n", i + 1, i + 1,
                      (unsigned long long)p.windows[i], i + 1,
                      (unsigned long long)p.iterations[i]);
        std::printf("  worst-case samples = %llu\n",
                    (unsigned long long)predicted_worst_samples(p));
        break;
      }
      case estimator_kind::general: {
        const auto p =
            make_general_params(cfg.family.k, cfg.eps, c.beta, c.gamma, c.cn, c.cr);
        std::printf("  beta = %s   gamma = %s   T = %zu\n", format_real(p.beta).c_str(),
                    format_real(p.gamma).c_str(), p.partition.count);
        std::printf("  boundaries:");
        for (double b : p.partition.boundaries) std::printf(" %s", format_real(b).c_str());
        std::printf("\n");
        for (std::size_t i = 1; i <= p.partition.count; ++i)
          std::printf("  band %zu: N_%zu = %llu   R_%zu = %llu\n", i, i,
                      (unsigned long long)p.windows[i - 1], i,
                      (unsigned long long)p.iterations[i - 1]);
        std::printf("  worst-case samples = %llu\n",
                    (unsigned long long)predicted_worst_samples(p));
        break;
      }
      case estimator_kind::plug_in: {
        const auto n = ceil_count(10.0 * static_cast<double>(cfg.family.k) / cfg.eps);
        std::printf("  samples n = %llu   registers = k + O(1)\n", (unsigned long long)n);
        break;
      }
    }
  } catch (const vacuous_partition& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    std::fprintf(stderr, "hint: lower --beta (practical default is 2) so every boundary "
                         "(log^(i) k)^beta / k stays below 1\n");
    return exit_config_error;
  }
  return exit_ok;
}

// -------------------------------------------------------------- estimate --

int cmd_estimate(const CLI::App* cmd, const cli_flags& f) {
  run_config cfg = build_config(cmd, f);
  const run_report report = run_trials(cfg);
  const std::string body = report_to_json(report).dump(2) + "\n";
  if (cfg.out.empty())
    std::fputs(body.c_str(), stdout);
  else
    write_text_file(cfg.out, body);
  const bool bits = cfg.bits_display;
  std::fprintf(stderr,
               "estimate: %s on %s (k=%zu): true H = %.6f %s, success(eps=%.4g) = %.3f, "
               "mean |err| = %.6f %s, max registers = %zu, failed trials = %zu\n",
               estimator_name(cfg.estimator), family_to_string(cfg.family).c_str(),
               cfg.family.k, display_entropy(report.true_entropy, bits), unit_label(bits),
               cfg.eps, report.success_rate,
               display_entropy(report.mean_abs_error, bits), unit_label(bits),
               report.max_registers, report.failed_trials);
  return exit_ok;
}

// ----------------------------------------------------------------- sweep --

int cmd_sweep(const CLI::App* cmd, const cli_flags& f, const std::string& k_list,
              const std::string& eps_list, const std::string& estimator_list) {
  run_config base = build_config(cmd, f);
  std::vector<std::size_t> ks;
  for (const auto& s : split_list(k_list.empty() ? std::to_string(base.family.k) : k_list))
    ks.push_back(static_cast<std::size_t>(std::stoull(s)));
  std::vector<double> epss;
  for (const auto& s : split_list(eps_list.empty() ? format_real(base.eps) : eps_list))
    epss.push_back(std::stod(s));
  std::vector<estimator_kind> estimators;
  if (estimator_list.empty())
    estimators.push_back(base.estimator);
  else
    for (const auto& s : split_list(estimator_list)) estimators.push_back(parse_estimator(s));
  if (ks.empty() || epss.empty() || estimators.empty())
    throw std::invalid_argument("sweep: the grid must be nonempty");

  std::ostringstream csv;
  csv << sweep_csv_header() << "\n";
  for (const auto k : ks)
    for (const auto eps : epss)
      for (const auto est : estimators) {
        run_config cfg = base;
        cfg.family.k = k;
        cfg.eps = eps;
        cfg.estimator = est;
        try {
          csv << sweep_csv_row(run_trials(cfg)) << "\n";
        } catch (const std::exception& e) {
          csv << sweep_csv_error_row(cfg, e.what()) << "\n";
        }
      }
  if (base.out.empty())
    std::fputs(csv.str().c_str(), stdout);
  else
    write_text_file(base.out, csv.str());
  return exit_ok;
}

// ---------------------------------------------------------------- verify --

struct check_result {
  std::string name;
  bool pass = false;
  std::string detail;
};

void report_check(std::vector<check_result>& out, const std::string& name, bool pass,
                  const std::string& detail) {
  out.push_back({name, pass, detail});
  std::printf("  %-4s %s%s%s\n", pass ? "ok" : "FAIL", name.c_str(),
              detail.empty() ? "" : ": ", detail.c_str());
}

std::vector<family_spec> bias_grid_families(std::size_t k) {
  std::vector<family_spec> out;
  family_spec u;
  u.kind = family::uniform;
  u.k = k;
  out.push_back(u);
  family_spec z;
  z.kind = family::zipf;
  z.k = k;
  out.push_back(z);
  family_spec t;
  t.kind = family::two_level;
  t.k = k;
  t.head_count = std::max<std::size_t>(1, k / 4);
  t.head_mass = t.head_count == k ? 1.0 : 0.75;
  out.push_back(t);
  return out;
}

std::vector<check_result> verify_lemmas() {
  std::vector<check_result> checks;
  // closed-form binomial reciprocal vs direct enumeration
  double worst = 0.0;
  bool ineq = true;
  for (std::uint64_t m = 0; m <= 30; ++m)
    for (int ri = 1; ri <= 99; ++ri) {
      const double r = ri / 100.0;
      kahan_sum brute;
      for (std::uint64_t l = 0; l <= m; ++l)
        brute.add(oracles::binom_pmf(m, r, l) / static_cast<double>(l + 1));
      const double closed = oracles::binom_recip_expectation(m, r);
      worst = std::max(worst, std::fabs(closed - brute.value()));
      if (closed > 1.0 / (r * static_cast<double>(m + 1)) + 1e-15) ineq = false;
    }
  report_check(checks, "binomial reciprocal closed form", worst <= 1e-12,
               "max |delta| = " + format_real(worst));
  report_check(checks, "binomial reciprocal inequality", ineq, "");

  // exact bias bracket over the family grid
  bool bias_ok = true;
  std::string bias_detail;
  for (std::size_t k = 1; k <= 8 && bias_ok; ++k)
    for (const auto& spec : bias_grid_families(k)) {
      const pmf p = materialize(spec);
      for (std::uint64_t window : {2ull, 8ull, 32ull, 64ull}) {
        const double gap = p.entropy() - oracles::exact_mean_simple(p, window);
        if (!(gap > 0.0 && gap <= static_cast<double>(k) / static_cast<double>(window))) {
          bias_ok = false;
          bias_detail = "violated at k=" + std::to_string(k) +
                        " family=" + family_to_string(spec) +
                        " N=" + std::to_string(window);
        }
      }
    }
  report_check(checks, "exact bias bracket 0 < H - E <= k/N", bias_ok, bias_detail);
  return checks;
}

std::vector<check_result> verify_memory() {
  std::vector<check_result> checks;
  std::size_t worst = 0;
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    for (const char* est : {"simple", "two-interval", "general"}) {
      for (std::size_t k : {8, 64, 1000}) {
        run_config cfg;
        cfg.family = parse_family("zipf:1", k);
        cfg.estimator = parse_estimator(est);
        cfg.eps = 0.5;
        cfg.trials = 1;
        cfg.seed = seed;
        const auto report = run_trials(cfg);
        worst = std::max(worst, report.max_registers);
        if (report.max_registers > 20 || report.failed_trials > 0) ok = false;
      }
    }
  }
  report_check(checks, "constant-space estimators stay within 20 words", ok,
               "max high-water = " + std::to_string(worst));

  run_config plug;
  plug.family = parse_family("uniform", 64);
  plug.estimator = estimator_kind::plug_in;
  plug.eps = 0.5;
  plug.trials = 1;
  plug.seed = 1;
  const auto plug_report = run_trials(plug);
  report_check(checks, "plug-in baseline needs linear space", plug_report.max_registers > 20,
               "high-water = " + std::to_string(plug_report.max_registers) + " at k = 64");
  return checks;
}

std::vector<check_result> verify_decomposition() {
  std::vector<check_result> checks;
  double worst = 0.0;
  random_source rng(424242);
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
    const auto d = oracles::decompose_entropy(p, model);
    worst = std::max(worst, std::fabs(d.recombined - p.entropy()));
  }
  report_check(checks, "random classifiers recombine to H(p)", worst <= 1e-12,
               "max |delta| = " + format_real(worst));

  double worst_exact = 0.0;
  for (std::uint64_t window : {1ull, 2ull}) {
    const pmf p(std::vector<double>{0.9, 0.1});
    const auto d =
        oracles::decompose_entropy(p, oracles::exact_estint_probs(p, window, 0.5));
    worst_exact = std::max(worst_exact, std::fabs(d.recombined - p.entropy()));
  }
  report_check(checks, "exact classifier recombines to H(p)", worst_exact <= 1e-12,
               "max |delta| = " + format_real(worst_exact));
  return checks;
}

std::vector<check_result> verify_concentration() {
  std::vector<check_result> checks;
  bool bound_ok = true;
  for (std::size_t k : {2, 8, 64, 1024})
    for (double eps : {0.1, 0.25, 0.5}) {
      const auto p = make_simple_params(k, eps);
      if (concentration_bound(p.iterations, static_cast<double>(p.window), eps / 2.0) >
          1.0 / 3.0)
        bound_ok = false;
    }
  report_check(checks, "designed parameters push the tail bound below 1/3", bound_ok, "");

  // empirical mass-estimate concentration against the Hoeffding bound
  const pmf p(std::vector<double>{0.5, 0.3, 0.2});
  const std::uint64_t window = 2, rounds = 200;
  const double split = 0.6, t = 0.1;
  const auto decomp =
      oracles::decompose_entropy(p, oracles::exact_estint_probs(p, window, split));
  const double bound = 2.0 * std::exp(-2.0 * static_cast<double>(rounds) * t * t);
  const int reps = 500;
  int violations = 0;
  for (int rep = 0; rep < reps; ++rep) {
    symbol_stream stream(p, random_source(mix_seed(31337, rep)));
    register_file rf(20);
    if (std::fabs(est_prob_int(stream, window, rounds, split, rf) - decomp.masses[0]) > t)
      ++violations;
  }
  const double freq = static_cast<double>(violations) / reps;
  const double slack = 4.0 * std::sqrt(bound * (1.0 - bound) / reps);
  report_check(checks, "mass estimate concentrates per Hoeffding", freq <= bound + slack,
               "freq = " + format_real(freq) + " bound = " + format_real(bound));

  // random-length batches against the random Hoeffding bound
  bool rh_ok = true;
  std::string rh_detail;
  for (double pr : {0.5, 1.0}) {
    const std::uint64_t m = 400;
    const double tt = 0.1;
    const double rh_bound = oracles::random_hoeffding_bound(m, pr, tt, 0.0, 1.0);
    int rh_violations = 0;
    const int rh_reps = 2000;
    for (int rep = 0; rep < rh_reps; ++rep) {
      random_source rng(mix_seed(606, static_cast<std::uint64_t>(rep * 7 + pr * 3)));
      std::uint64_t batch = 0;
      for (std::uint64_t i = 0; i < m; ++i)
        if (rng.next_double() < pr) ++batch;
      if (batch == 0) continue;
      kahan_sum total;
      for (std::uint64_t i = 0; i < batch; ++i) total.add(rng.next_double());
      const double mean = total.value() / static_cast<double>(batch);
      if (std::fabs(mean - 0.5) >= tt / pr) ++rh_violations;
    }
    const double rh_freq = static_cast<double>(rh_violations) / rh_reps;
    const double rh_slack = 4.0 * std::sqrt(rh_bound * (1.0 - rh_bound) / rh_reps) + 1e-12;
    if (rh_freq > rh_bound + rh_slack) {
      rh_ok = false;
      rh_detail = "freq " + format_real(rh_freq) + " > bound " + format_real(rh_bound);
    }
  }
  report_check(checks, "random-length batches respect the random Hoeffding bound", rh_ok,
               rh_detail);
  return checks;
}

int cmd_verify(const std::string& suite, const std::string& out_path) {
  std::printf("verify suite: %s\n", suite.c_str());
  std::vector<check_result> checks;
  if (suite == "lemmas")
    checks = verify_lemmas();
  else if (suite == "memory")
    checks = verify_memory();
  else if (suite == "decomposition")
    checks = verify_decomposition();
  else if (suite == "concentration")
    checks = verify_concentration();
  else
    throw std::invalid_argument(
        "unknown suite '" + suite +
        "' (expected lemmas, memory, decomposition or concentration)");
  std::size_t failures = 0;
  for (const auto& c : checks)
    if (!c.pass) ++failures;
  std::printf("%zu/%zu checks passed\n", checks.size() - failures, checks.size());
  if (!out_path.empty()) {
    nlohmann::json j;
    j["schema"] = "entrostream-report-v1";
    j["kind"] = "verify";
    j["suite"] = suite;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
      arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = arr;
    write_text_file(out_path, j.dump(2) + "\n");
  }
  return failures == 0 ? exit_ok : exit_suite_failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming entropy estimation toolbench"};
  app.require_subcommand(1);

  cli_flags params_flags, estimate_flags, sweep_flags;
  std::string sweep_k, sweep_eps, sweep_estimators;
  std::string verify_suite, verify_out;

  CLI::App* params = app.add_subcommand("params", "print estimator parameters for (k, eps)");
  add_common_flags(params, params_flags);

  CLI::App* estimate =
      app.add_subcommand("estimate", "run seeded trials and write a JSON report");
  add_common_flags(estimate, estimate_flags);

  CLI::App* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("suite", verify_suite,
                     "lemmas | memory | decomposition | concentration")
      ->required();
  verify->add_option("--out", verify_out, "write a JSON summary of the checks");

  CLI::App* sweep = app.add_subcommand("sweep", "grid of runs, one CSV row per point");
  add_common_flags(sweep, sweep_flags);
  sweep->add_option("--k-list", sweep_k, "comma-separated alphabet sizes");
  sweep->add_option("--eps-list", sweep_eps, "comma-separated accuracy targets");
  sweep->add_option("--estimator-list", sweep_estimators, "comma-separated estimators");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config_error;
  }

  try {
    if (*params) return cmd_params(params, params_flags);
    if (*estimate) return cmd_estimate(estimate, estimate_flags);
    if (*verify) return cmd_verify(verify_suite, verify_out);
    if (*sweep) return cmd_sweep(sweep, sweep_flags, sweep_k, sweep_eps, sweep_estimators);
  } catch (const vacuous_partition& e) {
    std::fprintf(stderr, "error: %s\nhint: lower --beta (practical default is 2)\n", e.what());
    return exit_config_error;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_config_error;
  }
  return exit_ok;
}

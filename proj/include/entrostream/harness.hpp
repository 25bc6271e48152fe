#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "entrostream/general.hpp"
#include "entrostream/oracles.hpp"
#include "entrostream/pmf.hpp"
#include "entrostream/simple.hpp"
#include "entrostream/two_interval.hpp"

namespace entrostream {

enum class estimator_kind { simple, two_interval, general, plug_in };
enum class run_mode { practical, theory_print };

inline const char* estimator_name(estimator_kind e) {
  switch (e) {
    case estimator_kind::simple: return "simple";
    case estimator_kind::two_interval: return "two-interval";
    case estimator_kind::general: return "general";
    case estimator_kind::plug_in: return "plug-in";
  }
  return "?";
}

inline estimator_kind parse_estimator(const std::string& name) {
  if (name == "simple") return estimator_kind::simple;
  if (name == "two-interval") return estimator_kind::two_interval;
  if (name == "general") return estimator_kind::general;
  if (name == "plug-in") return estimator_kind::plug_in;
  throw std::invalid_argument("unknown estimator '" + name +
                              "' (expected simple, two-interval, general or plug-in)");
}

inline const char* mode_name(run_mode m) {
  return m == run_mode::practical ? "practical" : "theory-print";
}

inline run_mode parse_mode(const std::string& name) {
  if (name == "practical") return run_mode::practical;
  if (name == "theory-print") return run_mode::theory_print;
  throw std::invalid_argument("unknown mode '" + name +
                              "' (expected practical or theory-print)");
}

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Reported numbers carry 12 significant digits.
inline double round_12sig(double v) {
  return std::strtod(format_real(v).c_str(), nullptr);
}

// Family syntax: uniform | dirac | zipf:<s> | geometric:<r> |
// two-level:<mass>,<count> | custom:<p1>,<p2>,...
inline family_spec parse_family(const std::string& text, std::size_t k) {
  family_spec spec;
  spec.k = k;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto split_args = [&args]() {
    std::vector<std::string> parts;
    std::stringstream ss(args);
    std::string part;
    while (std::getline(ss, part, ',')) parts.push_back(part);
    return parts;
  };
  if (head == "uniform") {
    spec.kind = family::uniform;
  } else if (head == "dirac") {
    spec.kind = family::dirac;
  } else if (head == "zipf") {
    spec.kind = family::zipf;
    if (!args.empty()) spec.zipf_exponent = std::stod(args);
  } else if (head == "geometric") {
    spec.kind = family::geometric;
    if (!args.empty()) spec.geometric_ratio = std::stod(args);
  } else if (head == "two-level") {
    spec.kind = family::two_level;
    const auto parts = split_args();
    if (parts.size() != 2)
      throw std::invalid_argument("two-level family needs two arguments: mass,count");
    spec.head_mass = std::stod(parts[0]);
    spec.head_count = static_cast<std::size_t>(std::stoull(parts[1]));
  } else if (head == "custom") {
    spec.kind = family::custom;
    for (const auto& part : split_args()) spec.custom_probs.push_back(std::stod(part));
    if (spec.custom_probs.empty())
      throw std::invalid_argument("custom family needs a probability list");
    spec.k = spec.custom_probs.size();
  } else {
    throw std::invalid_argument("unknown family '" + head + "'");
  }
  return spec;
}

inline std::string family_to_string(const family_spec& spec) {
  switch (spec.kind) {
    case family::uniform: return "uniform";
    case family::dirac: return "dirac";
    case family::zipf: return "zipf:" + format_real(spec.zipf_exponent);
    case family::geometric: return "geometric:" + format_real(spec.geometric_ratio);
    case family::two_level:
      return "two-level:" + format_real(spec.head_mass) + "," +
             std::to_string(spec.head_count);
    case family::custom: {
      std::string out = "custom:";
      for (std::size_t i = 0; i < spec.custom_probs.size(); ++i) {
        if (i) out += ",";
        out += format_real(spec.custom_probs[i]);
      }
      return out;
    }
  }
  return "?";
}

// Tunable constants. The defaults are the documented practical-mode values;
// the formal analysis needs far larger ones (see theory_constant_check).
// cn and cr sit above 1 so the smallest band keeps enough rounds to stay
// populated at desk scale.
struct constants_config {
  double beta = 2.0;
  double gamma = 1.0;  // beta / 2
  double c1 = 1.0;
  double c2 = 1.0;
  double cn = 2.0;
  double cr = 4.0;
  double ct = 30.0;
};

struct run_config {
  family_spec family;
  estimator_kind estimator = estimator_kind::simple;
  double eps = 0.5;
  run_mode mode = run_mode::practical;
  constants_config constants;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::size_t workers = 1;
  bool bits_display = false;  // affects printed summaries only; reports stay in nats
};

struct trial_record {
  std::size_t index = 0;
  double estimate = 0.0;
  double abs_error = 0.0;
  std::uint64_t samples = 0;
  std::size_t registers_high_water = 0;
  std::vector<std::size_t> degenerate_intervals;
  bool failed = false;
  std::string failure;
};

struct run_report {
  run_config config;
  double true_entropy = 0.0;
  std::uint64_t predicted_worst_samples = 0;
  std::vector<trial_record> trials;
  double success_rate = 0.0;   // exact fraction of trials with abs_error <= eps
  double mean_abs_error = 0.0;
  double p90_abs_error = 0.0;
  double mean_samples = 0.0;
  std::size_t max_registers = 0;
  std::size_t failed_trials = 0;
};

struct plug_in_params {
  std::uint64_t samples = 1;
};

using estimator_params =
    std::variant<simple_params, two_interval_params, general_params, plug_in_params>;

inline estimator_params resolve_params(const run_config& cfg) {
  const auto& c = cfg.constants;
  switch (cfg.estimator) {
    case estimator_kind::simple:
      return make_simple_params(cfg.family.k, cfg.eps);
    case estimator_kind::two_interval:
      return make_two_interval_params(cfg.family.k, cfg.eps, c.beta, c.c1, c.c2);
    case estimator_kind::general:
      return make_general_params(cfg.family.k, cfg.eps, c.beta, c.gamma, c.cn, c.cr);
    case estimator_kind::plug_in:
      return plug_in_params{ceil_count(10.0 * static_cast<double>(cfg.family.k) / cfg.eps)};
  }
  throw std::logic_error("resolve_params: unreachable");
}

inline std::uint64_t predicted_worst_samples(const estimator_params& params) {
  if (const auto* s = std::get_if<simple_params>(&params)) return predicted_worst_samples(*s);
  if (const auto* t = std::get_if<two_interval_params>(&params))
    return predicted_worst_samples(*t);
  if (const auto* g = std::get_if<general_params>(&params)) return predicted_worst_samples(*g);
  return std::get<plug_in_params>(params).samples;
}

// The constant-space estimators run against a hard 20-word budget; the plug-in
// baseline gets a linear budget and demonstrates the contrast.
inline std::size_t register_budget(const run_config& cfg) {
  return cfg.estimator == estimator_kind::plug_in ? cfg.family.k + 4 : 20;
}

inline trial_record run_one_trial(const run_config& cfg, const pmf& dist,
                                  const estimator_params& params, double truth,
                                  std::size_t index) {
  trial_record rec;
  rec.index = index;
  symbol_stream stream(dist, random_source(mix_seed(cfg.seed, index)));
  register_file rf(register_budget(cfg));
  try {
    estimate_result res;
    if (const auto* s = std::get_if<simple_params>(&params)) {
      res = run_simple(stream, *s, rf);
    } else if (const auto* t = std::get_if<two_interval_params>(&params)) {
      res = run_two_interval(stream, *t, rf);
    } else if (const auto* g = std::get_if<general_params>(&params)) {
      res = run_general(stream, *g, rf);
    } else {
      const auto& pi = std::get<plug_in_params>(params);
      res.estimate = oracles::plug_in_estimate(stream, pi.samples, rf);
      res.samples_consumed = stream.consumed();
      res.predicted_worst_samples = pi.samples;
      res.registers_high_water = rf.high_water();
    }
    rec.estimate = res.estimate;
    rec.abs_error = std::fabs(res.estimate - truth);
    rec.samples = res.samples_consumed;
    rec.registers_high_water = res.registers_high_water;
    rec.degenerate_intervals = res.degenerate_intervals;
  } catch (const capacity_exceeded& e) {
    rec.failed = true;
    rec.failure = e.what();
    rec.registers_high_water = rf.high_water();
  } catch (const std::exception& e) {
    // unexpected, but a broken trial must not take the batch down
    rec.failed = true;
    rec.failure = e.what();
    rec.registers_high_water = rf.high_water();
  }
  return rec;
}

inline void finalize_report(run_report& report) {
  const double eps = report.config.eps;
  std::size_t successes = 0;
  kahan_sum error_sum;
  kahan_sum sample_sum;
  std::vector<double> errors;
  for (const auto& rec : report.trials) {
    if (rec.failed) {
      ++report.failed_trials;
    } else {
      if (rec.abs_error <= eps) ++successes;
      error_sum.add(rec.abs_error);
      sample_sum.add(static_cast<double>(rec.samples));
      errors.push_back(rec.abs_error);
    }
    report.max_registers = std::max(report.max_registers, rec.registers_high_water);
  }
  const auto n = static_cast<double>(report.trials.size());
  report.success_rate = static_cast<double>(successes) / n;
  if (!errors.empty()) {
    report.mean_abs_error = error_sum.value() / static_cast<double>(errors.size());
    report.mean_samples = sample_sum.value() / static_cast<double>(errors.size());
    std::sort(errors.begin(), errors.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.9 * static_cast<double>(errors.size())));
    report.p90_abs_error = errors[rank == 0 ? 0 : rank - 1];
  }
}

// Runs the configured trials, possibly concurrently; records land by trial
// index, so the report does not depend on the schedule.
inline run_report run_trials(const run_config& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("run_trials: need at least one trial");
  run_report report;
  report.config = cfg;
  const pmf dist = materialize(cfg.family);
  report.true_entropy = dist.entropy();
  const estimator_params params = resolve_params(cfg);
  report.predicted_worst_samples = predicted_worst_samples(params);
  report.trials.resize(cfg.trials);
  const std::size_t workers = std::min<std::size_t>(std::max<std::size_t>(cfg.workers, 1),
                                                    cfg.trials);
  if (workers <= 1) {
    for (std::size_t i = 0; i < cfg.trials; ++i)
      report.trials[i] = run_one_trial(cfg, dist, params, report.true_entropy, i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < cfg.trials; i = next.fetch_add(1))
          report.trials[i] = run_one_trial(cfg, dist, params, report.true_entropy, i);
      });
    for (auto& th : pool) th.join();
  }
  finalize_report(report);
  return report;
}

inline nlohmann::json config_to_json(const run_config& cfg) {
  nlohmann::json j;
  j["family"] = family_to_string(cfg.family);
  j["k"] = cfg.family.k;
  j["estimator"] = estimator_name(cfg.estimator);
  j["eps"] = round_12sig(cfg.eps);
  j["mode"] = mode_name(cfg.mode);
  j["beta"] = round_12sig(cfg.constants.beta);
  j["gamma"] = round_12sig(cfg.constants.gamma);
  j["c1"] = round_12sig(cfg.constants.c1);
  j["c2"] = round_12sig(cfg.constants.c2);
  j["cn"] = round_12sig(cfg.constants.cn);
  j["cr"] = round_12sig(cfg.constants.cr);
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  return j;
}

// Reads a config document; keys mirror the report's config block, so a
// report's "config" object works as a config file. Missing keys keep their
// defaults.
inline run_config config_from_json(const nlohmann::json& j) {
  run_config cfg;
  if (j.contains("k")) cfg.family.k = j.at("k").get<std::size_t>();
  if (j.contains("family")) cfg.family = parse_family(j.at("family").get<std::string>(),
                                                      cfg.family.k);
  if (j.contains("estimator")) cfg.estimator = parse_estimator(j.at("estimator"));
  if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
  if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode"));
  if (j.contains("beta")) cfg.constants.beta = j.at("beta").get<double>();
  if (j.contains("gamma")) cfg.constants.gamma = j.at("gamma").get<double>();
  if (j.contains("c1")) cfg.constants.c1 = j.at("c1").get<double>();
  if (j.contains("c2")) cfg.constants.c2 = j.at("c2").get<double>();
  if (j.contains("cn")) cfg.constants.cn = j.at("cn").get<double>();
  if (j.contains("cr")) cfg.constants.cr = j.at("cr").get<double>();
  if (j.contains("ct")) cfg.constants.ct = j.at("ct").get<double>();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<std::size_t>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("workers")) cfg.workers = j.at("workers").get<std::size_t>();
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  if (j.contains("units")) cfg.bits_display = j.at("units").get<std::string>() == "bits";
  return cfg;
}

inline nlohmann::json report_to_json(const run_report& report) {
  nlohmann::json j;
  j["schema"] = "entrostream-report-v1";
  j["kind"] = "estimate";
  j["units"] = "nats";
  j["config"] = config_to_json(report.config);
  j["true_entropy"] = round_12sig(report.true_entropy);
  j["predicted_worst_samples"] = report.predicted_worst_samples;
  nlohmann::json agg;
  agg["success_rate"] = round_12sig(report.success_rate);
  agg["mean_abs_error"] = round_12sig(report.mean_abs_error);
  agg["p90_abs_error"] = round_12sig(report.p90_abs_error);
  agg["mean_samples"] = round_12sig(report.mean_samples);
  agg["max_registers"] = report.max_registers;
  agg["failed_trials"] = report.failed_trials;
  j["aggregates"] = agg;
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& rec : report.trials) {
    nlohmann::json t;
    t["trial"] = rec.index;
    if (rec.failed) {
      t["failed"] = true;
      t["error"] = rec.failure;
    } else {
      t["estimate"] = round_12sig(rec.estimate);
      t["abs_error"] = round_12sig(rec.abs_error);
    }
    t["samples"] = rec.samples;
    t["high_water"] = rec.registers_high_water;
    t["degenerate_intervals"] = rec.degenerate_intervals;
    trials.push_back(std::move(t));
  }
  j["trials"] = std::move(trials);
  return j;
}

inline const char* sweep_csv_header() {
  return "k,eps,estimator,family,trials,seed,true_entropy,success_rate,mean_abs_error,"
         "p90_abs_error,mean_samples,max_registers,predicted_worst_samples,error";
}

inline std::string sweep_csv_row(const run_report& r) {
  std::ostringstream row;
  row << r.config.family.k << ',' << format_real(r.config.eps) << ','
      << estimator_name(r.config.estimator) << ',' << family_to_string(r.config.family) << ','
      << r.config.trials << ',' << r.config.seed << ',' << format_real(r.true_entropy) << ','
      << format_real(r.success_rate) << ',' << format_real(r.mean_abs_error) << ','
      << format_real(r.p90_abs_error) << ',' << format_real(r.mean_samples) << ','
      << r.max_registers << ',' << r.predicted_worst_samples << ',';
  return row.str();
}

inline std::string sweep_csv_error_row(const run_config& cfg, const std::string& what) {
  std::ostringstream row;
  row << cfg.family.k << ',' << format_real(cfg.eps) << ',' << estimator_name(cfg.estimator)
      << ',' << family_to_string(cfg.family) << ',' << cfg.trials << ',' << cfg.seed
      << ",,,,,,,," << '"' << what << '"';
  return row.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace entrostream

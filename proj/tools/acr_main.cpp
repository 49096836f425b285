// Copyright 2026 The acr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// acr: reproducible aggregation of sample-split statistics.
//
// Exit status: 0 ok, 1 runtime failure (JSON error record on stderr),
// 2 usage error. Option values come from flags, then the --config JSON file,
// then defaults.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "acr/acr.hpp"
#include "acr/cv_select.hpp"
#include "acr/dataset.hpp"
#include "acr/error.hpp"
#include "acr/lasso.hpp"
#include "acr/seqtest.hpp"
#include "acr/stability.hpp"
#include "acr/statistics.hpp"
#include "acr/verify.hpp"

namespace {

using nlohmann::json;

const std::vector<std::string> kCommands = {"synth",     "run",       "cv-select",
                                            "seqtest",   "stability", "verify"};

// ---------------------------------------------------------------------------
// JSON configuration files.
//
// Top-level scalar keys configure the invoked subcommand; an object keyed by
// a subcommand name configures that subcommand only. Underscores in keys
// stand for dashes, so g_init and g-init both set --g-init.

class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::string command) : command_(std::move(command)) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return {};
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        if (key != command_) continue;  // settings for another subcommand
        for (const auto& [inner, v] : value.items()) add(items, inner, v);
      } else {
        add(items, key, value);
      }
    }
    return items;
  }

 private:
  static std::string scalar(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config key '" + key + "' must be a string, number or boolean");
  }

  void add(std::vector<CLI::ConfigItem>& items, std::string key, const json& value) const {
    for (char& ch : key) {
      if (ch == '_') ch = '-';
    }
    CLI::ConfigItem item;
    if (!command_.empty()) item.parents = {command_};
    item.name = key;
    if (value.is_array()) {
      for (const auto& v : value) item.inputs.push_back(scalar(v, key));
    } else {
      item.inputs.push_back(scalar(value, key));
    }
    items.push_back(std::move(item));
  }

  std::string command_;
};

// ---------------------------------------------------------------------------
// Options bound to typed variables, which also yield the effective config.

class OptionSet {
 public:
  explicit OptionSet(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* add(const std::string& name, T& var, const std::string& help) {
    record(name, var);
    CLI::Option* opt = app_->add_option("--" + name, var, help)->capture_default_str();
    // Lists accept "1,2,3" as well as "1 2 3".
    if constexpr (CLI::detail::is_mutable_container<T>::value && !std::is_same_v<T, std::string>) {
      opt->delimiter(',');
    }
    return opt;
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& help) {
    record(name, var);
    return app_->add_flag("--" + name, var, help);
  }

  json effective() const {
    json out = json::object();
    for (const auto& [name, get] : entries_) out[name] = get();
    return out;
  }

  CLI::App* app() const { return app_; }

 private:
  template <typename T>
  void record(const std::string& name, T& var) {
    entries_.emplace_back(name, [&var] { return json(var); });
  }

  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<json()>>> entries_;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool g_verbose = false;

void log(const std::string& message) {
  if (g_verbose) std::cerr << "acr: " << message << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) acr::fail(acr::ErrorCode::kIo, "cannot open for writing: " + path);
  out << text;
  if (!out) acr::fail(acr::ErrorCode::kIo, "write failed: " + path);
}

void emit(const json& result, const std::string& out_path) {
  const std::string text = result.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
}

json envelope(const std::string& command, const json& config, std::uint64_t seed) {
  return {{"schema_version", acr::kSchemaVersion},
          {"command", command},
          {"config", config},
          {"seed", seed}};
}

// ---------------------------------------------------------------------------
// Data sources.

struct SynthOptions {
  std::size_t n = 500;
  std::size_t p = 10;
  std::size_t sparsity = 3;
  double theta_scale = 1.0;
  double tau = 0.0;
  double prop = 0.5;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
  bool no_treatment = false;

  // seed_name differs between `synth` (--seed) and the other commands.
  void bind(OptionSet& opts, const std::string& seed_name) {
    opts.add("n", n, "synthetic rows");
    opts.add("p", p, "synthetic covariates");
    opts.add("sparsity", sparsity, "nonzero coefficients in the outcome model");
    opts.add("theta-scale", theta_scale, "size of the nonzero coefficients");
    opts.add("tau", tau, "constant treatment effect");
    opts.add("prop", prop, "treatment probability");
    opts.add("noise-sd", noise_sd, "outcome noise standard deviation");
    opts.add(seed_name, seed, "seed of the synthetic data");
    opts.flag("no-treatment", no_treatment, "omit the treatment column");
  }

  acr::SyntheticSpec spec() const {
    acr::SyntheticSpec s;
    s.n = n;
    s.p = p;
    s.sparsity = sparsity;
    s.theta_scale = theta_scale;
    s.tau = tau;
    s.prop = prop;
    s.noise_sd = noise_sd;
    s.seed = seed;
    s.with_treatment = !no_treatment;
    return s;
  }
};

struct DataOptions {
  std::string data;
  std::string outcome = "y";
  std::string treatment;
  std::vector<std::string> ignore;
  bool synthetic = false;
  SynthOptions synth;

  void bind(OptionSet& opts) {
    opts.add("data", data, "CSV dataset")->group("Data");
    opts.add("outcome", outcome, "outcome column of --data")->group("Data");
    opts.add("treatment", treatment, "binary treatment column of --data")->group("Data");
    opts.add("ignore", ignore, "columns of --data to skip (repeatable)")->group("Data");
    opts.flag("synthetic", synthetic, "use the synthetic generator instead of --data")
        ->group("Data");
    synth.bind(opts, "data-seed");
  }

  acr::Dataset load() const {
    if (data.empty() == !synthetic) {
      throw UsageError("give exactly one data source: --data FILE or --synthetic");
    }
    if (synthetic) {
      log("generating synthetic data");
      return acr::generate_synthetic(synth.spec());
    }
    acr::CsvSchema schema;
    schema.outcome = outcome;
    if (!treatment.empty()) schema.treatment = treatment;
    schema.ignore = ignore;
    log("loading " + data);
    return acr::load_csv(data, schema);
  }
};

// ---------------------------------------------------------------------------
// Statistics.

using AnyStatistic = std::variant<acr::StatisticSpec, acr::CrossSplitStatistic>;

std::size_t arity(const AnyStatistic& stat) {
  return std::visit([](const auto& s) { return s.arity; }, stat);
}

std::string label(const AnyStatistic& stat) {
  return std::visit([](const auto& s) { return s.label; }, stat);
}

acr::RowSubset parse_subset(const std::string& s) {
  if (s == "all") return acr::RowSubset::kAll;
  if (s == "treated") return acr::RowSubset::kTreated;
  if (s == "control") return acr::RowSubset::kControl;
  throw UsageError("--subset must be all, treated or control");
}

acr::Propensity parse_propensity(const std::string& s) {
  if (s == "lpm") return acr::Propensity::lpm();
  const std::string prefix = "known:";
  if (s.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string value = s.substr(prefix.size());
      const double p = std::stod(value, &used);
      if (used == value.size() && p > 0.0 && p < 1.0) return acr::Propensity::known(p);
    } catch (const std::exception&) {
    }
  }
  throw UsageError("--propensity must be lpm or known:<p> with 0 < p < 1");
}

struct StatOptions {
  std::string stat = "cv-mse";
  std::vector<double> lambda;
  std::vector<double> lambda_fraction;
  std::size_t lambda_count = 10;
  double lambda_ratio = 0.01;
  std::string subset = "all";
  std::string propensity = "known:0.5";
  double eps_pi = 0.01;

  void bind(OptionSet& opts, const std::vector<std::string>& choices) {
    opts.add("stat", stat, "statistic")->check(CLI::IsMember(choices))->group("Statistic");
    auto* abs = opts.add("lambda", lambda, "explicit lasso penalties")->group("Statistic");
    auto* rel = opts.add("lambda-fraction", lambda_fraction,
                         "penalties as fractions of lambda_max of the data")
                    ->group("Statistic");
    abs->excludes(rel);
    opts.add("lambda-count", lambda_count, "length of the default log-spaced penalty grid")
        ->group("Statistic");
    opts.add("lambda-ratio", lambda_ratio, "smallest / largest penalty of the grid")
        ->group("Statistic");
    opts.add("subset", subset, "rows used by cv-mse: all, treated or control")
        ->group("Statistic");
    opts.add("propensity", propensity, "dml propensity: known:<p> or lpm")->group("Statistic");
    opts.add("eps-pi", eps_pi, "propensity clipping for dml")->group("Statistic");
  }

  // Penalties in the order given, or the descending default grid.
  std::vector<double> lambdas(const acr::Dataset& data) const {
    if (!lambda.empty()) return lambda;
    std::vector<acr::Index> rows;
    const acr::RowSubset which = parse_subset(subset);
    for (acr::Index i = 0; i < data.n(); ++i) {
      if (which == acr::RowSubset::kAll ||
          (data.has_treatment() && (data.w()[i] == 1.0) == (which == acr::RowSubset::kTreated))) {
        rows.push_back(i);
      }
    }
    if (rows.size() < 2) acr::fail(acr::ErrorCode::kEmptyArm, "too few rows in --subset");
    const double lmax = acr::LassoProblem(data, rows).lambda_max();
    if (!lambda_fraction.empty()) {
      std::vector<double> out;
      for (double f : lambda_fraction) out.push_back(f * lmax);
      return out;
    }
    return acr::lambda_grid(lmax, lambda_count, lambda_ratio);
  }

  acr::AipwOptions aipw() const {
    acr::AipwOptions o;
    o.propensity = parse_propensity(propensity);
    o.eps_pi = eps_pi;
    return o;
  }

  AnyStatistic build(const acr::Dataset& data) const {
    if (stat == "cv-mse" || stat == "cv-mse-diff") {
      if (data.has_treatment() && parse_subset(subset) == acr::RowSubset::kAll) {
        log("note: cv-mse ignores the treatment column");
      }
      auto base = acr::cv_mse_statistic(lambdas(data), parse_subset(subset));
      if (stat == "cv-mse") return base;
      return acr::mse_difference_statistic(base);
    }
    if (stat == "dml") return acr::aipw_statistic(aipw());
    if (stat == "dml-pvalue") return acr::dml_pvalue_statistic(aipw());
    throw UsageError("unknown --stat " + stat);
  }

  json describe(const AnyStatistic& built, const acr::Dataset& data) const {
    json out = {{"name", stat}, {"label", label(built)}, {"arity", arity(built)}};
    if (stat == "cv-mse" || stat == "cv-mse-diff") out["lambdas"] = lambdas(data);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Aggregation settings.

struct AcrOptions {
  std::vector<double> xi;
  double beta = 0.05;
  std::size_t k = 10;
  std::size_t b = 0;
  std::size_t g_init = 10;
  std::size_t g_max = 1'000'000;
  std::uint64_t seed = 0;

  void bind(OptionSet& opts, bool xi_required) {
    auto* x = opts.add("xi", xi, "tolerance, one value or one per component")->group("ACR");
    if (xi_required) x->required();
    opts.add("beta", beta, "nominal reproducibility error")->group("ACR");
    opts.add("k", k, "blocks per cross-split")->group("ACR");
    opts.add("b", b, "rows per block; 0 means n / k")->group("ACR");
    opts.add("g-init", g_init, "burn-in cross-splits")->group("ACR");
    opts.add("g-max", g_max, "hard cap on cross-splits")->group("ACR");
    opts.add("seed", seed, "seed of the split stream")->group("ACR");
  }

  acr::AcrConfig config(std::size_t components, int threads) const {
    acr::AcrConfig cfg;
    if (xi.size() == 1) {
      cfg.xi.assign(components, xi[0]);
    } else if (xi.size() == components) {
      cfg.xi = xi;
    } else {
      throw UsageError("--xi needs 1 or " + std::to_string(components) + " values, got " +
                       std::to_string(xi.size()));
    }
    cfg.beta = beta;
    cfg.k = k;
    cfg.b = b;
    cfg.g_init = g_init;
    cfg.g_max = g_max;
    cfg.seed = seed;
    cfg.threads = threads;
    return cfg;
  }
};

json warnings(const acr::AcrResult& r) {
  json out = json::array();
  if (r.early_stop_warning) {
    out.push_back("v_hat was already below cv at g_init; the reproducibility error is likely "
                  "far below beta. A smaller xi gives a tighter guarantee.");
  }
  if (r.stopped_by_cap) out.push_back("stopped at g_max before reaching the tolerance");
  if (r.g_hat_max < 500) {
    out.push_back("fewer than 500 cross-splits were drawn; the normal approximation behind "
                  "the guarantee may be loose");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands.

struct SynthCommand {
  SynthOptions synth;
  std::string out;
  OptionSet opts;

  explicit SynthCommand(CLI::App& root)
      : opts(root.add_subcommand("synth", "write a synthetic dataset as CSV")) {
    synth.bind(opts, "seed");
    opts.add("out", out, "CSV output path")->required();
  }

  int run() {
    const acr::Dataset data = acr::generate_synthetic(synth.spec());
    acr::write_csv(data, out);
    json result = envelope("synth", opts.effective(), synth.seed);
    result["n"] = data.n();
    result["p"] = data.p();
    result["columns"] = data.column_names();
    emit(result, "");
    return 0;
  }
};

struct RunCommand {
  DataOptions data;
  StatOptions stat;
  AcrOptions acr;
  std::string out;
  std::string trace;
  std::string dump_splits;
  int threads = 1;
  OptionSet opts;

  explicit RunCommand(CLI::App& root)
      : opts(root.add_subcommand("run", "aggregate a statistic over random cross-splits")) {
    data.bind(opts);
    stat.bind(opts, {"cv-mse", "cv-mse-diff", "dml", "dml-pvalue"});
    acr.bind(opts, true);
    opts.add("out", out, "result JSON path (default stdout)");
    opts.add("trace", trace, "per-split trace CSV path");
    opts.add("dump-splits", dump_splits, "write every drawn cross-split as JSON lines");
    opts.add("threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }

  int run() {
    const acr::Dataset d = data.load();
    const AnyStatistic s = stat.build(d);
    acr::AcrConfig cfg = acr.config(arity(s), threads);
    cfg.keep_trace = !trace.empty();
    std::ofstream splits_out;
    if (!dump_splits.empty()) {
      splits_out.open(dump_splits, std::ios::binary);
      if (!splits_out) acr::fail(acr::ErrorCode::kIo, "cannot open for writing: " + dump_splits);
      cfg.on_split = [&](std::size_t g, const acr::CrossSplit& split) {
        splits_out << acr::split_json_line(g, split) << '\n';
      };
    }
    log("running " + label(s));
    const auto start = std::chrono::steady_clock::now();
    const acr::AcrResult r = std::visit([&](const auto& st) { return acr::run_acr(st, d, cfg); }, s);
    acr::ReportContext ctx;
    ctx.statistic = label(s);
    ctx.xi = cfg.xi;
    ctx.beta = cfg.beta;
    ctx.k = cfg.k;
    ctx.b = cfg.plan(d.n()).b;
    ctx.g_init = cfg.g_init;
    ctx.seed = cfg.seed;
    ctx.wall_time_seconds = seconds_since(start);
    json result = acr::report(r, ctx);
    result["command"] = "run";
    result["config"] = opts.effective();
    result["statistic_info"] = stat.describe(s, d);
    result["n"] = d.n();
    result["warnings"] = warnings(r);
    if (!trace.empty()) write_text(trace, acr::trace_csv(r.trace));
    if (splits_out.is_open()) {
      splits_out.close();
      if (!splits_out) acr::fail(acr::ErrorCode::kIo, "write failed: " + dump_splits);
    }
    log("done after " + std::to_string(r.g_hat_max) + " cross-splits");
    emit(result, out);
    return 0;
  }
};

struct CvSelectCommand {
  DataOptions data;
  acr::CvSelectConfig cfg;
  std::string subset = "all";
  std::string out;
  OptionSet opts;

  explicit CvSelectCommand(CLI::App& root)
      : opts(root.add_subcommand("cv-select",
                                 "choose the lasso penalty by reproducible cross-validation")) {
    data.bind(opts);
    opts.add("lambda-count", cfg.grid_length, "penalty grid length");
    opts.add("lambda-ratio", cfg.grid_ratio, "smallest / largest penalty of the grid");
    opts.add("xi-floor", cfg.xi_floor, "smallest tolerance");
    opts.add("beta", cfg.beta, "nominal reproducibility error");
    opts.add("k", cfg.k, "blocks per cross-split");
    opts.add("b", cfg.b, "rows per block; 0 means n / k");
    opts.add("g-init", cfg.g_init, "burn-in cross-splits");
    opts.add("g-max", cfg.g_max, "hard cap on cross-splits");
    opts.add("g-pilot", cfg.g_pilot, "pilot cross-splits for the tolerances");
    opts.add("p-cut", cfg.p_cut, "screening cut for the tolerance reference");
    opts.add("subset", subset, "rows used: all, treated or control");
    opts.add("seed", cfg.seed, "seed of the split streams");
    opts.add("threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
    opts.add("out", out, "result JSON path (default stdout)");
  }

  int run() {
    const acr::Dataset d = data.load();
    cfg.subset = parse_subset(subset);
    const auto start = std::chrono::steady_clock::now();
    const acr::CvSelectResult r = acr::cv_select(d, cfg);
    json result = envelope("cv-select", opts.effective(), cfg.seed);
    result["result"] = acr::to_json(r, d);
    result["warnings"] = warnings(r.acr);
    if (r.tolerances.no_component_passed) {
      result["warnings"].push_back("no penalty passed the pilot screen; every tolerance is "
                                   "the floor");
    }
    result["wall_time_seconds"] = seconds_since(start);
    emit(result, out);
    return 0;
  }
};

struct SeqTestCommand {
  DataOptions data;
  std::string mode = "pvalue";
  std::string stat;
  std::string propensity = "known:0.5";
  double eps_pi = 0.01;
  double delta = 0.025;
  double c = 0.5;
  double alpha = 0.05;
  double sd = 1.0;
  AcrOptions acr;
  std::size_t validity_runs = 0;
  std::size_t null_n = 200;
  int threads = 1;
  std::string out;
  OptionSet opts;

  explicit SeqTestCommand(CLI::App& root)
      : opts(root.add_subcommand("seqtest", "hypothesis tests valid at the stopping time")) {
    data.bind(opts);
    opts.add("mode", mode, "pvalue (proportion test) or evalue")
        ->check(CLI::IsMember({"pvalue", "evalue"}));
    opts.add("stat", stat,
             "gaussian-mean or dml-pvalue (pvalue mode), gaussian-ui (evalue mode); "
             "default gaussian-mean / gaussian-ui")
        ->check(CLI::IsMember({"", "gaussian-mean", "dml-pvalue", "gaussian-ui"}));
    opts.add("propensity", propensity, "dml propensity: known:<p> or lpm");
    opts.add("eps-pi", eps_pi, "propensity clipping for dml");
    opts.add("delta", delta, "p-value threshold of the proportion test");
    opts.add("c", c, "rejection cut of the proportion test; level delta / c");
    opts.add("alpha", alpha, "level of the e-value test");
    opts.add("sd", sd, "known outcome sd of gaussian-mean");
    acr.bind(opts, true);
    opts.add("validity-runs", validity_runs,
             "instead of testing the data, simulate this many null datasets");
    opts.add("null-n", null_n, "rows of each simulated null dataset");
    opts.add("threads", threads, "worker threads")->check(CLI::PositiveNumber);
    opts.add("out", out, "result JSON path (default stdout)");
  }

  std::string effective_stat() const {
    const std::string s = stat.empty() ? (mode == "pvalue" ? "gaussian-mean" : "gaussian-ui")
                                       : stat;
    const bool ok = mode == "pvalue" ? s != "gaussian-ui" : s == "gaussian-ui";
    if (!ok) throw UsageError("--stat " + s + " does not fit --mode " + mode);
    return s;
  }

  int run() {
    const std::string s = effective_stat();
    const auto start = std::chrono::steady_clock::now();
    json result = envelope("seqtest", opts.effective(), acr.seed);
    result["statistic"] = s;
    if (validity_runs > 0) {
      if (s == "dml-pvalue") throw UsageError("validity simulation uses gaussian statistics");
      acr::ValidityReport rep;
      if (mode == "pvalue") {
        acr::PValueTestConfig cfg{delta, c, acr.config(1, 1)};
        rep = acr::simulate_pvalue_validity(cfg, null_n, validity_runs, acr.seed, threads);
      } else {
        acr::EValueTestConfig cfg{alpha, acr.config(1, 1)};
        rep = acr::simulate_evalue_validity(cfg, null_n, validity_runs, acr.seed, threads);
      }
      result["validity"] = acr::to_json(rep);
    } else {
      const acr::Dataset d = data.load();
      acr::SeqTestResult r;
      if (mode == "pvalue") {
        acr::PValueTestConfig cfg{delta, c, acr.config(1, threads)};
        if (s == "dml-pvalue") {
          acr::AipwOptions o;
          o.propensity = parse_propensity(propensity);
          o.eps_pi = eps_pi;
          r = acr::run_pvalue_test(acr::dml_pvalue_statistic(o), d, cfg);
        } else {
          r = acr::run_pvalue_test(acr::gaussian_mean_pvalue_statistic(sd), d, cfg);
        }
        result["level"] = cfg.level();
      } else {
        acr::EValueTestConfig cfg{alpha, acr.config(1, threads)};
        r = acr::run_evalue_test(acr::universal_inference_evalue_statistic(), d, cfg);
        result["level"] = alpha;
      }
      result["reject"] = r.reject;
      result["test_statistic"] = r.statistic;
      result["threshold"] = r.threshold;
      result["g_hat"] = r.g_hat;
      result["v_hat"] = r.acr.v_hat[0];
      result["residual_se"] = r.acr.residual_se[0];
      result["stopped_by_cap"] = r.acr.stopped_by_cap;
      result["warnings"] = warnings(r.acr);
    }
    result["wall_time_seconds"] = seconds_since(start);
    emit(result, out);
    return 0;
  }
};

struct StabilityCommand {
  DataOptions data;
  StatOptions stat;
  acr::StabilityOptions so;
  std::size_t k = 10;
  std::string out;
  OptionSet opts;

  explicit StabilityCommand(CLI::App& root)
      : opts(root.add_subcommand("stability", "estimate sample and split stability")) {
    data.bind(opts);
    stat.stat = "dml";
    stat.bind(opts, {"cv-mse", "cv-mse-diff", "dml"});
    opts.add("b", so.b, "block size; 0 means n / k");
    opts.add("k", k, "blocks per cross-split, used for b and gamma");
    opts.add("q", so.q_grid, "replaced training rows (default 1, ceil(b/2), b-1)");
    opts.add("r", so.r_grid, "moment orders");
    opts.add("reps", so.reps, "Monte Carlo replications");
    opts.add("component", so.component, "statistic component");
    opts.add("zeta-candidates", so.zeta_candidates, "candidate blocks per split-stability rep");
    opts.add("zeta-exact-limit", so.zeta_exact_limit,
             "enumerate every block when there are at most this many");
    opts.add("seed", so.seed, "Monte Carlo seed");
    opts.add("threads", so.threads, "worker threads")->check(CLI::PositiveNumber);
    opts.add("out", out, "result JSON path (default stdout)");
  }

  int run() {
    const acr::Dataset d = data.load();
    const AnyStatistic s = stat.build(d);
    const auto* spec = std::get_if<acr::StatisticSpec>(&s);
    if (spec == nullptr) throw UsageError("stability needs a per-block statistic");
    if (k == 0) throw UsageError("--k must be positive");
    acr::StabilityOptions options = so;
    if (options.b == 0) options.b = d.n() / k;
    const auto start = std::chrono::steady_clock::now();
    const acr::StabilityReport rep = acr::stability_report(*spec, d, options);
    json result = envelope("stability", opts.effective(), so.seed);
    result["statistic_info"] = stat.describe(s, d);
    result["b"] = options.b;
    result["stability"] = acr::to_json(rep);
    try {
      result["gamma"] = acr::gamma_quantity(rep, k, options.b, d.n());
    } catch (const acr::Error& e) {
      result["gamma"] = nullptr;
      result["gamma_note"] = e.what();
    }
    result["wall_time_seconds"] = seconds_since(start);
    emit(result, out);
    return 0;
  }
};

struct VerifyCommand {
  std::string suite = "all";
  acr::VerifyOptions vo;
  SynthOptions synth;
  std::string out;
  std::string csv_dir;
  OptionSet opts;

  explicit VerifyCommand(CLI::App& root)
      : opts(root.add_subcommand("verify", "Monte Carlo checks on a synthetic dataset")) {
    std::vector<std::string> suites = acr::kVerifySuites;
    suites.push_back("all");
    opts.add("suite", suite, "which check to run")->check(CLI::IsMember(suites));
    opts.add("seed", vo.seed, "master seed")->required();
    synth.no_treatment = true;
    synth.bind(opts, "data-seed");
    opts.add("lambda-fraction", vo.lambda_fraction, "penalty as a fraction of lambda_max");
    opts.add("beta", vo.beta, "nominal reproducibility error");
    opts.add("k", vo.k, "blocks per cross-split");
    opts.add("g-init", vo.g_init, "burn-in cross-splits");
    opts.add("target-g", vo.target_g, "xi is tuned so that g* is about this");
    opts.add("k-list", vo.k_list, "fold counts of the scaling sweeps");
    opts.add("pairs", vo.pairs, "paired runs of the reproducibility check");
    opts.add("reps", vo.reps, "single cross-splits per k in the scaling check");
    opts.add("runs", vo.runs, "runs of the stopping check");
    opts.add("v1k-reps", vo.v1k_reps, "cross-splits estimating v_{1,k}");
    opts.add("vhat-reps", vo.vhat_reps, "replications of the v_hat check");
    opts.add("split-runs", vo.split_runs, "runs per k of the total-splits check");
    opts.add("threads", vo.threads, "worker threads")->check(CLI::PositiveNumber);
    opts.add("out", out, "report JSON path (default stdout)");
    opts.add("csv-dir", csv_dir, "directory for plot-ready CSV tables");
  }

  int run() {
    acr::VerifyOptions options = vo;
    options.data = synth.spec();
    options.data.with_treatment = false;
    const auto start = std::chrono::steady_clock::now();
    const acr::SuiteOutput so = acr::run_verify_suite(suite, options);
    json result = envelope("verify", opts.effective(), vo.seed);
    json reports = json::array();
    bool all_pass = true;
    for (const auto& r : so.reports) {
      reports.push_back(acr::to_json(r));
      all_pass = all_pass && r.pass;
    }
    result["reports"] = reports;
    result["all_pass"] = all_pass;
    if (!csv_dir.empty()) {
      std::filesystem::create_directories(csv_dir);
      json files = json::array();
      for (const auto& [name, text] : so.csv) {
        const std::string path = (std::filesystem::path(csv_dir) / (name + ".csv")).string();
        write_text(path, text);
        files.push_back(name + ".csv");
      }
      result["csv_files"] = files;
    }
    result["wall_time_seconds"] = seconds_since(start);
    emit(result, out);
    return 0;
  }
};

std::string invoked_command(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    for (const auto& c : kCommands) {
      if (arg == c) return c;
    }
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acr: reproducible aggregation of randomized sample-split statistics"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>(invoked_command(argc, argv)));
  app.set_config("--config", "", "JSON file of option values (flags take precedence)");
  app.add_flag("--verbose", g_verbose, "log progress to stderr");

  SynthCommand synth(app);
  RunCommand run(app);
  CvSelectCommand cv(app);
  SeqTestCommand seq(app);
  StabilityCommand stab(app);
  VerifyCommand verify(app);
  app.allow_config_extras(false);
  for (const auto& name : kCommands) {
    app.get_subcommand(name)->fallthrough()->allow_config_extras(false);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth.opts.app()->parsed()) return synth.run();
    if (run.opts.app()->parsed()) return run.run();
    if (cv.opts.app()->parsed()) return cv.run();
    if (seq.opts.app()->parsed()) return seq.run();
    if (stab.opts.app()->parsed()) return stab.run();
    if (verify.opts.app()->parsed()) return verify.run();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return 2;
  } catch (const acr::Error& e) {
    const json err = {{"error", {{"code", acr::error_code_name(e.code())}, {"message", e.what()}}}};
    std::cerr << err.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    const json err = {{"error", {{"code", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
  return 2;
}

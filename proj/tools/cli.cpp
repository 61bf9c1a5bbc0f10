#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sumnorm/core.hpp"
#include "sumnorm/errors.hpp"
#include "sumnorm/gibbs.hpp"
#include "sumnorm/reference.hpp"
#include "sumnorm/report.hpp"
#include "sumnorm/simulation.hpp"

namespace sumnorm::cli {

namespace {

using json = nlohmann::json;

constexpr const char* kOutputDirEnv = "SUMNORM_OUTPUT_DIR";
constexpr const char* kDefaultOutputDir = "sumnorm-output";

struct Options {
  std::int64_t n = 0;
  double mean = 0.0, min = 0.0, max = 0.0;

  std::string method = "gibbs";
  std::int64_t iters = 10000, burnin = 5000, thin = 1;
  std::uint64_t seed = 0;
  std::string init_mu = "auto", init_sigma_sq = "auto";
  double mh_step_scale = SamplerConfig{}.mh_step_scale;
  std::int64_t mh_pilot = 500;
  std::string mu_trunc = "root", mu_conditioning = "observed";

  double mu0 = Priors{}.mu0, tau0_sq = Priors{}.tau0_sq;
  double alpha0 = Priors{}.alpha0, beta0 = Priors{}.beta0;

  double true_mu = 0.0, true_sigma = 5.0;
  std::string sizes = "10,50,100,500,1000";
  std::int64_t replicates = 20;
  std::string methods = "gibbs,metropolis";
  unsigned workers = 0;
  std::string out_dir;
  bool plots = false, timing = false;
  std::string format;
  std::string config_path;
};

std::string to_snake(std::string flag) {
  for (auto& c : flag) {
    if (c == '-') c = '_';
  }
  return flag;
}

std::string json_scalar_to_string(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  if (j.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << j.get<double>();
    return os.str();
  }
  throw ValidationError("config: expected a string or number, got " + j.dump());
}

// Tracks every option of one subcommand so a JSON config file can fill in
// whatever was not given on the command line.
class Registry {
 public:
  explicit Registry(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* option(const std::string& flag, T& target, const std::string& help) {
    auto* opt = app_->add_option("--" + flag, target, help);
    bind(flag, opt, [&target](const json& j) { target = j.get<T>(); });
    return opt;
  }

  // String option that also accepts a JSON number or array (joined by ',').
  CLI::Option* list_option(const std::string& flag, std::string& target,
                           const std::string& help) {
    auto* opt = app_->add_option("--" + flag, target, help);
    bind(flag, opt, [&target](const json& j) {
      if (!j.is_array()) {
        target = json_scalar_to_string(j);
        return;
      }
      std::string joined;
      for (const auto& item : j) joined += (joined.empty() ? "" : ",") + json_scalar_to_string(item);
      target = joined;
    });
    return opt;
  }

  CLI::Option* flag(const std::string& name, bool& target, const std::string& help) {
    auto* opt = app_->add_flag("--" + name, target, help);
    bind(name, opt, [&target](const json& j) { target = j.get<bool>(); });
    return opt;
  }

  bool provided(const std::string& flag) const {
    const auto key = to_snake(flag);
    for (const auto& b : bindings_) {
      if (b.key == key) return b.opt->count() > 0 || b.from_file;
    }
    return false;
  }

  void merge(const json& config) {
    if (!config.is_object()) throw ValidationError("config file must hold a JSON object");
    for (const auto& [key, value] : config.items()) {
      auto it = std::find_if(bindings_.begin(), bindings_.end(),
                             [&](const Binding& b) { return b.key == key; });
      if (it == bindings_.end()) throw ValidationError("config: unknown key '" + key + "'");
      if (it->opt->count() > 0) continue;  // flags win
      try {
        it->assign(value);
      } catch (const json::exception& e) {
        throw ValidationError("config: bad value for '" + key + "': " + e.what());
      }
      it->from_file = true;
    }
  }

 private:
  struct Binding {
    std::string key;
    CLI::Option* opt;
    std::function<void(const json&)> assign;
    bool from_file = false;
  };

  void bind(const std::string& flag, CLI::Option* opt, std::function<void(const json&)> fn) {
    bindings_.push_back({to_snake(flag), opt, std::move(fn)});
  }

  CLI::App* app_;
  std::vector<Binding> bindings_;
};

void add_sampler_options(Registry& reg, Options& o) {
  reg.option("iters", o.iters, "Total iterations per chain");
  reg.option("burnin", o.burnin, "Leading iterations discarded as burn-in");
  reg.option("thin", o.thin, "Keep every k-th retained draw");
  reg.option("seed", o.seed, "Random seed (generated and reported when omitted)");
  reg.list_option("init-mu", o.init_mu, "Initial mu, or 'auto' (reported mean)");
  reg.list_option("init-sigma-sq", o.init_sigma_sq,
                  "Initial sigma^2, or 'auto' (((max - min) / 4)^2)");
  reg.option("mh-step-scale", o.mh_step_scale, "Metropolis proposal scale multiplier");
  reg.option("mh-pilot", o.mh_pilot, "Metropolis pilot iterations before the one-off rescale");
  reg.option("mu-trunc", o.mu_trunc, "Truncation location: root | one-shot");
  reg.option("mu-conditioning", o.mu_conditioning,
             "Mean used by the mu update: observed | augmented (experimental)");
  reg.option("mu0", o.mu0, "Prior mean of mu");
  reg.option("tau0-sq", o.tau0_sq, "Prior variance of mu");
  reg.option("alpha0", o.alpha0, "Inverse-gamma prior shape for sigma^2");
  reg.option("beta0", o.beta0, "Inverse-gamma prior scale for sigma^2");
}

void add_study_options(Registry& reg, Options& o, bool with_methods) {
  reg.option("true-mu", o.true_mu, "Mean of the data-generating normal");
  reg.option("true-sigma", o.true_sigma, "Standard deviation of the data-generating normal");
  reg.list_option("sizes", o.sizes, "Comma-separated sample sizes");
  reg.option("replicates", o.replicates, "Replicates per sample size");
  if (with_methods) reg.list_option("methods", o.methods, "Comma-separated: gibbs,metropolis");
  reg.option("workers", o.workers, "Worker threads (0 = number of processors)");
  reg.option("out-dir", o.out_dir,
             std::string("Output directory (default $") + kOutputDirEnv + " or " +
                 kDefaultOutputDir + ")");
  reg.flag("plots", o.plots, "Also write SVG plots");
  reg.flag("timing", o.timing, "Record wall_time_ms (makes output run-dependent)");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first != std::string::npos) out.push_back(item.substr(first, last - first + 1));
  }
  return out;
}

std::optional<double> parse_init(const std::string& text, const char* what) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError(std::string(what) + ": expected a number or 'auto', got '" + text + "'");
}

Method parse_method_or_throw(const std::string& text) {
  if (auto m = parse_method(text)) return *m;
  throw ValidationError("unknown method '" + text + "' (expected gibbs or metropolis)");
}

SamplerConfig build_sampler(const Options& o, std::uint64_t seed) {
  SamplerConfig c;
  c.iterations = o.iters;
  c.burn_in = o.burnin;
  c.thin = o.thin;
  c.seed = seed;
  c.init_mu = parse_init(o.init_mu, "init_mu");
  c.init_sigma_sq = parse_init(o.init_sigma_sq, "init_sigma_sq");
  c.method = parse_method_or_throw(o.method);
  c.mh_step_scale = o.mh_step_scale;
  c.mh_pilot_iterations = o.mh_pilot;
  if (o.mu_trunc == "root") {
    c.mu_trunc_mode = MuTruncMode::root;
  } else if (o.mu_trunc == "one-shot") {
    c.mu_trunc_mode = MuTruncMode::one_shot;
  } else {
    throw ValidationError("mu_trunc must be 'root' or 'one-shot'");
  }
  if (o.mu_conditioning == "observed") {
    c.mu_conditioning = MuConditioning::observed;
  } else if (o.mu_conditioning == "augmented") {
    c.mu_conditioning = MuConditioning::augmented;
  } else {
    throw ValidationError("mu_conditioning must be 'observed' or 'augmented'");
  }
  require_valid(c);
  return c;
}

Priors build_priors(const Options& o) {
  Priors p{o.mu0, o.tau0_sq, o.alpha0, o.beta0};
  require_valid(p);
  return p;
}

json config_json(const SamplerConfig& c, const Priors& p) {
  auto init = [](const std::optional<double>& v) { return v ? json(*v) : json("auto"); };
  return {{"method", to_string(c.method)},
          {"iters", c.iterations},
          {"burnin", c.burn_in},
          {"thin", c.thin},
          {"seed", c.seed},
          {"init_mu", init(c.init_mu)},
          {"init_sigma_sq", init(c.init_sigma_sq)},
          {"mh_step_scale", c.mh_step_scale},
          {"mh_pilot", c.mh_pilot_iterations},
          {"mu_trunc", c.mu_trunc_mode == MuTruncMode::root ? "root" : "one-shot"},
          {"mu_conditioning",
           c.mu_conditioning == MuConditioning::observed ? "observed" : "augmented"},
          {"mu0", p.mu0},
          {"tau0_sq", p.tau0_sq},
          {"alpha0", p.alpha0},
          {"beta0", p.beta0}};
}

json summary_json(const ParamSummary& s) {
  return {{"post_mean", s.post_mean}, {"post_sd", s.post_sd}, {"ci_lower", s.ci_lower},
          {"ci_upper", s.ci_upper},   {"ess", s.ess},         {"rhat", s.rhat}};
}

std::uint64_t resolve_seed(const Registry& reg, const Options& o, std::ostream& err) {
  if (reg.provided("seed")) return o.seed;
  std::random_device device;
  const std::uint64_t seed = (static_cast<std::uint64_t>(device()) << 32) | device();
  err << "seed: " << seed << '\n';
  return seed;
}

void load_config(Registry& reg, const Options& o) {
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path);
  if (!in) throw ValidationError("cannot read config file " + o.config_path);
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    throw ValidationError("config file " + o.config_path + " is not valid JSON: " + e.what());
  }
  reg.merge(config);
}

std::filesystem::path resolve_out_dir(const Options& o) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return kDefaultOutputDir;
}

void check_format(const std::string& format) {
  if (format != "json" && format != "csv") {
    throw ValidationError("format must be 'json' or 'csv', got '" + format + "'");
  }
}

int cmd_estimate(Registry& reg, Options& o, std::ostream& out, std::ostream& err) {
  load_config(reg, o);
  if (o.format.empty()) o.format = "json";
  check_format(o.format);
  for (const char* flag : {"n", "mean", "min", "max"}) {
    if (!reg.provided(flag)) {
      throw ValidationError(std::string("estimate: --") + flag +
                            " is required (with --n, --mean, --min, --max)");
    }
  }
  const SummaryStats stats{o.n, o.mean, o.min, o.max};
  require_valid(stats);
  const Priors priors = build_priors(o);
  const SamplerConfig config = build_sampler(o, resolve_seed(reg, o, err));

  const Chain chain = config.method == Method::gibbs ? run_gibbs(stats, priors, config)
                                                     : run_metropolis(stats, priors, config);
  const PosteriorSummary summary = summarize(chain);
  for (const auto& w : chain.warnings) err << "warning: " << w << '\n';

  if (o.format == "csv") {
    out << "param,post_mean,post_sd,ci_lower,ci_upper,ess,rhat,method,seed,schema_version\n";
    for (Param p : {Param::mu, Param::sigma}) {
      const auto& s = p == Param::mu ? summary.mu : summary.sigma;
      out << to_string(p) << ',' << format_fixed(s.post_mean, 6) << ','
          << format_fixed(s.post_sd, 6) << ',' << format_fixed(s.ci_lower, 6) << ','
          << format_fixed(s.ci_upper, 6) << ',' << format_fixed(s.ess, 6) << ','
          << format_fixed(s.rhat, 6) << ',' << to_string(config.method) << ',' << config.seed
          << ',' << kSchemaVersion << '\n';
    }
    return kOk;
  }
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "estimate";
  doc["method"] = to_string(config.method);
  doc["seed"] = config.seed;
  doc["input"] = {{"n", stats.n}, {"mean", stats.mean}, {"min", stats.min}, {"max", stats.max}};
  doc["config"] = config_json(config, priors);
  doc["mu"] = summary_json(summary.mu);
  doc["sigma"] = summary_json(summary.sigma);
  doc["diagnostics"] = {
      {"retained", summary.retained},
      {"acceptance_rate", chain.acceptance_rate ? json(*chain.acceptance_rate) : json(nullptr)},
      {"warnings", chain.warnings}};
  out << doc.dump(2) << '\n';
  return kOk;
}

Scenario build_scenario(Registry& reg, Options& o, std::ostream& err, bool force_both) {
  Scenario s;
  s.true_mu = o.true_mu;
  s.true_sigma = o.true_sigma;
  s.sizes.clear();
  for (const auto& item : split_list(o.sizes)) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      s.sizes.push_back(v);
    } catch (const std::exception&) {
      throw ValidationError("sizes: '" + item + "' is not an integer");
    }
  }
  s.replicates = o.replicates;
  s.priors = build_priors(o);
  s.base_seed = resolve_seed(reg, o, err);
  s.sampler = build_sampler(o, s.base_seed);
  s.methods.clear();
  if (force_both) {
    s.methods = {Method::gibbs, Method::metropolis};
  } else {
    for (const auto& m : split_list(o.methods)) s.methods.push_back(parse_method_or_throw(m));
  }
  s.workers = o.workers;
  s.record_timing = o.timing;
  require_valid(s);
  return s;
}

json scenario_json(const Scenario& s, const std::string& command) {
  json methods = json::array();
  for (auto m : s.methods) methods.push_back(to_string(m));
  json config = config_json(s.sampler, s.priors);
  config.erase("method");
  config["seed"] = s.base_seed;
  config["true_mu"] = s.true_mu;
  config["true_sigma"] = s.true_sigma;
  config["sizes"] = s.sizes;
  config["replicates"] = s.replicates;
  config["methods"] = methods;
  return {{"schema_version", kSchemaVersion}, {"command", command}, {"config", config}};
}

json aggregate_json(const std::vector<AggregateRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"size", r.size},
                   {"method", to_string(r.method)},
                   {"param", to_string(r.param)},
                   {"rmse", r.rmse},
                   {"coverage", r.coverage},
                   {"n_ok", r.n_ok},
                   {"n_failed", r.n_failed}});
  }
  return arr;
}

void report_failures(const std::vector<ReplicateResult>& results, std::ostream& err) {
  for (const auto& r : results) {
    if (!r.ok) {
      err << "replicate failed (size " << r.size << ", replicate " << r.replicate << ", "
          << to_string(r.method) << ", seed " << r.seed << "): " << r.error << '\n';
    }
  }
}

int cmd_simulate(Registry& reg, Options& o, std::ostream& out, std::ostream& err) {
  load_config(reg, o);
  if (o.format.empty()) o.format = "csv";
  check_format(o.format);
  const Scenario scenario = build_scenario(reg, o, err, false);
  const auto out_dir = resolve_out_dir(o);
  const auto results = run_replicates(scenario);
  report_failures(results, err);
  emit_report(results, scenario, out_dir, o.plots);
  json manifest = scenario_json(scenario, "simulate");
  write_text_file(out_dir / "run.json", manifest.dump(2) + "\n");

  const auto rows = aggregate(results, scenario);
  if (o.format == "csv") {
    write_aggregate_csv(out, rows);
  } else {
    manifest["aggregate"] = aggregate_json(rows);
    out << manifest.dump(2) << '\n';
  }
  return kOk;
}

int cmd_compare(Registry& reg, Options& o, std::ostream& out, std::ostream& err) {
  load_config(reg, o);
  if (o.format.empty()) o.format = "csv";
  check_format(o.format);
  const Scenario scenario = build_scenario(reg, o, err, true);
  const auto out_dir = resolve_out_dir(o);
  const auto results = run_replicates(scenario);
  report_failures(results, err);
  emit_report(results, scenario, out_dir, o.plots);
  const auto rows = aggregate(results, scenario);
  const auto comparison = compare_methods(rows);

  std::ostringstream csv;
  write_comparison_csv(csv, comparison);
  write_text_file(out_dir / "comparison.csv", csv.str());
  json manifest = scenario_json(scenario, "compare");
  write_text_file(out_dir / "run.json", manifest.dump(2) + "\n");

  std::int64_t flagged = 0;
  for (const auto& c : comparison) flagged += c.flagged ? 1 : 0;
  if (o.format == "csv") {
    out << csv.str();
  } else {
    json arr = json::array();
    for (const auto& c : comparison) {
      arr.push_back({{"size", c.size},
                     {"param", to_string(c.param)},
                     {"rmse_gibbs", c.rmse_gibbs},
                     {"rmse_metropolis", c.rmse_metropolis},
                     {"relative_difference", c.relative_difference},
                     {"flagged", c.flagged}});
    }
    manifest["comparison"] = arr;
    manifest["threshold"] = kAgreementThreshold;
    manifest["flagged_cells"] = flagged;
    out << manifest.dump(2) << '\n';
  }
  if (flagged > 0) {
    err << flagged << " cell(s) exceed the " << kAgreementThreshold * 100
        << "% RMSE agreement threshold for n >= " << kAgreementMinSize << '\n';
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian estimation of a normal mean and variance from the reported sample "
               "size, mean, minimum and maximum"};
  app.name("sumnorm");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  Options o;

  auto* estimate = app.add_subcommand("estimate", "Posterior summaries from reported statistics");
  Registry estimate_reg(estimate);
  estimate_reg.option("n", o.n, "Sample size (>= 3)");
  estimate_reg.option("mean", o.mean, "Reported sample mean");
  estimate_reg.option("min", o.min, "Reported minimum");
  estimate_reg.option("max", o.max, "Reported maximum");
  estimate_reg.option("method", o.method, "Sampler: gibbs | metropolis");
  add_sampler_options(estimate_reg, o);
  estimate_reg.option("format", o.format, "Output format: json | csv")->default_str("json");
  estimate->add_option("--config", o.config_path, "JSON config file (flags override)");

  auto* simulate = app.add_subcommand("simulate", "Replicated simulation study");
  Registry simulate_reg(simulate);
  add_study_options(simulate_reg, o, true);
  add_sampler_options(simulate_reg, o);
  simulate_reg.option("format", o.format, "Standard-output format: csv | json")->default_str("csv");
  simulate->add_option("--config", o.config_path, "JSON config file (flags override)");

  auto* compare = app.add_subcommand("compare", "Gibbs vs Metropolis RMSE comparison");
  Registry compare_reg(compare);
  add_study_options(compare_reg, o, false);
  add_sampler_options(compare_reg, o);
  compare_reg.option("format", o.format, "Standard-output format: csv | json")->default_str("csv");
  compare->add_option("--config", o.config_path, "JSON config file (flags override)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (estimate->parsed()) return cmd_estimate(estimate_reg, o, out, err);
    if (simulate->parsed()) return cmd_simulate(simulate_reg, o, out, err);
    return cmd_compare(compare_reg, o, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace sumnorm::cli

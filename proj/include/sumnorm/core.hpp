#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sumnorm {

/// The observed tuple: sample size, sample mean, minimum and maximum.
struct SummaryStats {
  std::int64_t n = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Normal prior N(mu0, tau0_sq) on mu and InvGamma(alpha0, beta0) on sigma^2.
struct Priors {
  double mu0 = 0.0;
  double tau0_sq = 1e4;
  double alpha0 = 2.0;
  double beta0 = 2.0;
};

enum class Method { gibbs, metropolis };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view text);

/// How the location of the augmentation truncated normal is obtained.
enum class MuTruncMode {
  root,      // exact root of E[Z] = 0
  one_shot,  // single evaluation of the correction term at location 0
};

/// Which sample mean the mu update conditions on.
enum class MuConditioning {
  observed,   // the reported mean
  augmented,  // mean of the current augmented sample (experimental)
};

struct SamplerConfig {
  std::int64_t iterations = 10000;
  std::int64_t burn_in = 5000;
  std::int64_t thin = 1;
  std::uint64_t seed = 0;
  std::optional<double> init_mu;       // nullopt = auto
  std::optional<double> init_sigma_sq; // nullopt = auto
  Method method = Method::gibbs;
  double mh_step_scale = 1.6970562748477141;  // 2.4 / sqrt(2)
  std::int64_t mh_pilot_iterations = 500;
  MuTruncMode mu_trunc_mode = MuTruncMode::root;
  MuConditioning mu_conditioning = MuConditioning::observed;
};

struct Draw {
  double mu;
  double sigma_sq;
};

struct Chain {
  std::vector<Draw> draws;
  SamplerConfig config;
  std::optional<double> acceptance_rate;  // metropolis only
  std::vector<std::string> warnings;
};

struct ParamSummary {
  double post_mean = 0.0;
  double post_sd = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double ess = 0.0;
  double rhat = 1.0;
};

/// Summaries for mu and for sigma (square root of the sigma^2 draws).
struct PosteriorSummary {
  ParamSummary mu;
  ParamSummary sigma;
  std::size_t retained = 0;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class ViolationCode {
  non_finite,
  n_too_small,
  min_ge_max,
  mean_out_of_range,
  infeasible_adj_mean,
};

/// Machine-readable code, e.g. "N_TOO_SMALL".
std::string_view to_string(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string message;
};

/// Relative slack (times max - min) allowed on the adjusted mean to absorb
/// rounding in published tables.
inline constexpr double kFeasibilityTolerance = 1e-9;

/// Every violated invariant; empty means valid. Never throws.
std::vector<Violation> validate(const SummaryStats& stats);

/// Throws ValidationError listing all violations.
void require_valid(const SummaryStats& stats);
void require_valid(const Priors& priors);
void require_valid(const SamplerConfig& config);

/// The documented "auto" defaults: mean, and ((max - min) / 4)^2.
double auto_init_mu(const SummaryStats& stats);
double auto_init_sigma_sq(const SummaryStats& stats);

// ---------------------------------------------------------------------------
// Posterior summaries
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMinRetainedDraws = 100;

/// Post-burn-in, thinned draws. Throws ValidationError if fewer than
/// kMinRetainedDraws remain.
std::vector<Draw> retained_draws(const Chain& chain);

PosteriorSummary summarize(const Chain& chain);

/// Summary of a single scalar trace (already burned-in and thinned).
ParamSummary summarize_trace(const std::vector<double>& trace);

/// Type-7 (linear interpolation) quantile of unsorted data.
double quantile(std::vector<double> values, double p);

/// ESS by Geyer's initial positive sequence; clamped to (0, trace size].
double effective_sample_size(const std::vector<double>& trace);

/// Potential scale reduction from the two halves of one chain.
double split_rhat(const std::vector<double>& trace);

}  // namespace sumnorm

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sumnorm/core.hpp"
#include "sumnorm/rng.hpp"

namespace sumnorm {

struct Scenario {
  double true_mu = 0.0;
  double true_sigma = 5.0;
  std::vector<std::int64_t> sizes{10, 50, 100, 500, 1000};
  std::int64_t replicates = 20;
  Priors priors;
  SamplerConfig sampler;  // template; seed and method are set per cell
  std::vector<Method> methods{Method::gibbs, Method::metropolis};
  std::uint64_t base_seed = 0;
  unsigned workers = 0;        // 0 = hardware concurrency
  bool record_timing = false;  // wall_time_ms stays 0 unless set
};

/// Throws ValidationError.
void require_valid(const Scenario& scenario);

enum class Param { mu, sigma };
std::string_view to_string(Param param);

struct ReplicateResult {
  std::int64_t size = 0;
  std::int64_t replicate = 0;
  Method method = Method::gibbs;
  std::uint64_t seed = 0;  // cell seed, see cell_seed()
  PosteriorSummary summary;
  std::optional<double> acceptance_rate;
  double wall_time_ms = 0.0;
  bool ok = false;
  std::string error;  // empty when ok

  const ParamSummary& param(Param p) const { return p == Param::mu ? summary.mu : summary.sigma; }
};

std::vector<double> generate_dataset(RngState& rng, std::int64_t n, double mu, double sigma);

/// Exact n, arithmetic mean, min and max. Throws ValidationError for fewer
/// than 3 samples.
SummaryStats summarize_dataset(std::span<const double> samples);

/// Cell seed hash(base_seed, size, replicate). The dataset for the cell is
/// drawn from RngState(cell_seed) and shared by all methods, so methods are
/// compared on identical data; each method's sampler is seeded with
/// sampler_seed(cell_seed, method).
std::uint64_t cell_seed(std::uint64_t base_seed, std::int64_t size, std::int64_t replicate);
std::uint64_t sampler_seed(std::uint64_t cell_seed, Method method);

/// One (size, replicate, method) cell, reproducible in isolation. Failures
/// are captured in the result, never thrown.
ReplicateResult run_replicate(const Scenario& scenario, std::int64_t size,
                              std::int64_t replicate, Method method);

/// All cells ordered by (size, replicate, method) in scenario order,
/// independent of worker count and completion order.
std::vector<ReplicateResult> run_replicates(const Scenario& scenario);

/// sqrt(mean((estimate - truth)^2)); throws std::invalid_argument if empty.
double rmse(std::span<const double> estimates, double truth);

struct Interval {
  double lower;
  double upper;
};

/// Fraction of intervals containing truth; throws std::invalid_argument if empty.
double coverage(std::span<const Interval> intervals, double truth);
/// Coverage of the successful results' credible intervals for `param`.
double coverage(std::span<const ReplicateResult> results, Param param, double truth);

struct AggregateRow {
  std::int64_t size;
  Method method;
  Param param;
  double rmse;      // NaN if no successful replicate
  double coverage;  // NaN if no successful replicate
  std::int64_t n_ok;
  std::int64_t n_failed;
};

/// One row per (size, method, param), RMSE of posterior means on the sigma
/// scale for sigma. Failed replicates are excluded and counted.
std::vector<AggregateRow> aggregate(std::span<const ReplicateResult> results,
                                    const Scenario& scenario);

struct ComparisonRow {
  std::int64_t size;
  Param param;
  double rmse_gibbs;
  double rmse_metropolis;
  double relative_difference;  // |gibbs - metropolis| / metropolis
  bool flagged;                // size >= flag_min_size and difference > threshold
};

inline constexpr double kAgreementThreshold = 0.30;
inline constexpr std::int64_t kAgreementMinSize = 100;

std::vector<ComparisonRow> compare_methods(std::span<const AggregateRow> rows,
                                           double threshold = kAgreementThreshold,
                                           std::int64_t flag_min_size = kAgreementMinSize);

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace sumnorm

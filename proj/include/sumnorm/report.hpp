#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "sumnorm/simulation.hpp"

namespace sumnorm {

inline constexpr int kSchemaVersion = 1;

inline constexpr const char* kTidyHeader =
    "size,replicate,method,"
    "mu_post_mean,mu_post_sd,mu_ci_lower,mu_ci_upper,mu_ess,mu_rhat,"
    "sigma_post_mean,sigma_post_sd,sigma_ci_lower,sigma_ci_upper,sigma_ess,sigma_rhat,"
    "seed,wall_time_ms,status";
inline constexpr const char* kAggregateHeader = "size,method,param,rmse,coverage,n_ok,n_failed";
inline constexpr const char* kComparisonHeader =
    "size,param,rmse_gibbs,rmse_metropolis,relative_difference,flagged";

/// printf("%.*f"), with "nan"/"inf" spelled out; locale-independent.
std::string format_fixed(double value, int precision);

/// Two rows (mu, sigma) per result, in result order.
void write_tidy_csv(std::ostream& out, std::span<const ReplicateResult> results);
void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows);
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);

/// Posterior mean with 95% interval against n (log axis), first replicate
/// of each size, one panel per (parameter, method).
std::string render_estimates_svg(std::span<const ReplicateResult> results,
                                 const Scenario& scenario);
/// RMSE against n (log axis) per method, one panel per parameter.
std::string render_rmse_svg(std::span<const AggregateRow> rows, const Scenario& scenario);

struct ReportFiles {
  std::filesystem::path tidy;
  std::filesystem::path aggregate;
  std::optional<std::filesystem::path> estimates_plot;
  std::optional<std::filesystem::path> rmse_plot;
};

/// Writes replicates.csv, aggregate.csv and, if requested, estimates.svg
/// and rmse.svg into out_dir (created if missing). Throws IoError naming
/// the offending path.
ReportFiles emit_report(std::span<const ReplicateResult> results, const Scenario& scenario,
                        const std::filesystem::path& out_dir, bool plots);

/// Writes `content` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace sumnorm

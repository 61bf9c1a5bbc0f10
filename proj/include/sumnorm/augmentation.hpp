#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sumnorm/core.hpp"
#include "sumnorm/rng.hpp"

namespace sumnorm {

/// Quantities derived once from the summary statistics: the mean of the
/// n - 2 intermediate values and the bounds centered on it.
struct AugmentationContext {
  double x_bar_adj = 0.0;
  double a_star = 0.0;
  double b_star = 0.0;
  std::int64_t n_missing = 0;
  double min = 0.0;
  double max = 0.0;

  /// Throws ValidationError on infeasible stats.
  static AugmentationContext from(const SummaryStats& stats);
};

/// (n * mean - min - max) / (n - 2). Throws std::domain_error for n < 3.
double adjusted_mean(const SummaryStats& stats);

/// (min - x_bar_adj, max - x_bar_adj).
std::pair<double, double> centered_bounds(const SummaryStats& stats);

/// Location m with E[TN(m, sigma_sq, a_star, b_star)] = 0.
///
/// The truncated mean is strictly increasing in m, so the root is unique
/// and is bracketed by [a_star - 50 sigma, b_star + 50 sigma] whenever
/// a_star < 0 < b_star. When a bound touches zero (x_bar_adj equal to min
/// or max) the root escapes to infinity and the nearer bracket end is
/// returned. Throws NumericalError if the bracket does not straddle zero
/// for any other reason.
double solve_mu_trunc(double sigma_sq, double a_star, double b_star);

/// The correction term evaluated once at location 0:
///   -sigma * (phi(a*/sigma) - phi(b*/sigma)) / (Phi(b*/sigma) - Phi(a*/sigma)).
/// A first-order approximation of solve_mu_trunc.
double one_shot_mu_trunc(double sigma_sq, double a_star, double b_star);

double mu_trunc(MuTruncMode mode, double sigma_sq, double a_star, double b_star);

/// Fills x_star (resized to n) with [min, interior..., max], where the
/// n - 2 interior values are z + x_bar_adj, z ~ TN(mu_trunc, sigma_sq,
/// a_star, b_star) independently.
void augment_into(RngState& rng, const AugmentationContext& ctx, double sigma_sq,
                  MuTruncMode mode, std::vector<double>& x_star);

std::vector<double> augment(RngState& rng, const SummaryStats& stats, double sigma_sq,
                            MuTruncMode mode = MuTruncMode::root);

}  // namespace sumnorm

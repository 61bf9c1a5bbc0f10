#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "sumnorm/core.hpp"
#include "sumnorm/rng.hpp"

namespace sumnorm {

// Likelihood of the summary statistics under independent treatment of the
// adjusted mean, the minimum and the maximum:
//
//   L(mu, sigma^2) = TN(xbar_adj | mu, sigma^2 / (n - 2), min, max)
//                    * f_min(min | mu, sigma^2) * f_max(max | mu, sigma^2)
//
// with f_min = n (1 - Phi)^(n-1) phi and f_max = n Phi^(n-1) phi. Everything
// is evaluated in log space so n up to the thousands neither underflows nor
// overflows.

/// log of n (1 - Phi(x))^(n-1) phi(x); -inf where the density is 0.
double log_min_density(double x, std::int64_t n, double mu, double sigma_sq);
/// log of n Phi(x)^(n-1) phi(x).
double log_max_density(double x, std::int64_t n, double mu, double sigma_sq);

struct LikelihoodTerms {
  double adjusted_mean;  // log TN(xbar_adj | mu, sigma^2/(n-2), min, max)
  double minimum;        // log f_min(min)
  double maximum;        // log f_max(max)

  double total() const { return adjusted_mean + minimum + maximum; }
};

LikelihoodTerms likelihood_terms(const SummaryStats& stats, double mu, double sigma_sq);

/// Sum of the three log terms; -inf (never an exception) when the adjusted
/// mean lies outside [min, max] beyond the feasibility tolerance.
double log_likelihood(const SummaryStats& stats, double mu, double sigma_sq);

/// log N(mu | mu0, tau0^2) + log InvGamma(sigma^2 | alpha0, beta0).
double log_prior(const Priors& priors, double mu, double sigma_sq);

/// Posterior density over (mu, log sigma^2), including the log-transform
/// Jacobian (+ log sigma^2).
double log_posterior(const SummaryStats& stats, const Priors& priors, double mu,
                     double log_sigma_sq);

struct LogPosteriorPoint {
  double mu;
  double log_sigma_sq;
  double log_density;
};

// ---------------------------------------------------------------------------
// Random-walk Metropolis
// ---------------------------------------------------------------------------

/// Accepts with probability min(1, exp(log_ratio)); NaN and -inf reject.
bool metropolis_accept(RngState& rng, double log_ratio);

using LogDensity2 = std::function<double(double, double)>;

struct RandomWalkOptions {
  std::array<double, 2> scales{1.0, 1.0};  // proposal SDs per coordinate
  std::int64_t iterations = 1000;
  std::int64_t pilot_iterations = 0;  // one acceptance-based rescale afterwards
  double target_acceptance = 0.3;
  double acceptance_band_lo = 0.2;
  double acceptance_band_hi = 0.4;
};

struct RandomWalkResult {
  std::vector<std::array<double, 2>> states;  // length = options.iterations
  std::vector<bool> accepted;
  std::array<double, 2> final_scales{};
  double pilot_acceptance = 0.0;
};

/// Independent normal proposals per coordinate. After the pilot phase the
/// scales are multiplied once by Phi^-1(target/2) / Phi^-1(pilot_rate/2)
/// (only when the pilot rate falls outside the band) and then held fixed,
/// so the recorded iterations use a non-adaptive kernel.
RandomWalkResult random_walk_metropolis(const LogDensity2& log_density,
                                        std::array<double, 2> init,
                                        const RandomWalkOptions& options, RngState& rng);

/// Random-walk Metropolis on (mu, log sigma^2) under log_posterior.
/// Proposal scales are config.mh_step_scale times sqrt(sigma0^2 / n) for mu
/// and 0.9 / log(n) for log sigma^2. Acceptance is reported over the
/// post-burn-in draws; a rate outside [1%, 99%] adds a warning.
Chain run_metropolis(const SummaryStats& stats, const Priors& priors,
                     const SamplerConfig& config);

}  // namespace sumnorm

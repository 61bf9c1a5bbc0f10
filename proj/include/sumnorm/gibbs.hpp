#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sumnorm/augmentation.hpp"
#include "sumnorm/core.hpp"
#include "sumnorm/rng.hpp"

namespace sumnorm {

struct NormalParams {
  double mean;
  double variance;
};

struct InverseGammaParams {
  double shape;
  double scale;
};

/// N((mu0/tau0^2 + n xbar/sigma^2) / (1/tau0^2 + n/sigma^2),
///   1 / (1/tau0^2 + n/sigma^2)).
NormalParams mu_conditional(double sigma_sq, double sample_mean, std::int64_t n,
                            const Priors& priors);

/// InvGamma(alpha0 + n/2, beta0 + sum (x - mu)^2 / 2).
InverseGammaParams sigma_sq_conditional(double mu, std::span<const double> x_star,
                                        const Priors& priors);

/// Conditions on the reported mean of `stats`.
double sample_mu_conditional(RngState& rng, double sigma_sq, const SummaryStats& stats,
                             const Priors& priors);

double sample_sigma_sq_conditional(RngState& rng, double mu, std::span<const double> x_star,
                                   const Priors& priors);

struct GibbsState {
  double mu = 0.0;
  double sigma_sq = 1.0;
  std::vector<double> x_star;
};

/// One chain of the data-augmentation Gibbs sampler. Each step augments the
/// intermediate values given the previous sigma^2, then draws mu, then
/// draws sigma^2 from the fresh augmented sample and the fresh mu.
class GibbsSampler {
 public:
  GibbsSampler(const SummaryStats& stats, const Priors& priors, const SamplerConfig& config);

  void step();
  const GibbsState& state() const { return state_; }
  std::int64_t iteration() const { return iteration_; }

 private:
  SummaryStats stats_;
  Priors priors_;
  SamplerConfig config_;
  AugmentationContext ctx_;
  RngState rng_;
  GibbsState state_;
  std::int64_t iteration_ = 0;
};

/// Runs config.iterations steps and records every (mu, sigma^2) draw.
/// Numerical failures are rethrown as NumericalError tagged with the
/// iteration index.
Chain run_gibbs(const SummaryStats& stats, const Priors& priors, const SamplerConfig& config);

}  // namespace sumnorm

#include "sumnorm/gibbs.hpp"

#include <cassert>
#include <numeric>
#include <stdexcept>

#include "sumnorm/distributions.hpp"
#include "sumnorm/errors.hpp"

namespace sumnorm {

NormalParams mu_conditional(double sigma_sq, double sample_mean, std::int64_t n,
                            const Priors& priors) {
  if (!(sigma_sq > 0.0)) throw std::domain_error("mu_conditional: sigma_sq must be positive");
  const double data_precision = static_cast<double>(n) / sigma_sq;
  const double prior_precision = 1.0 / priors.tau0_sq;
  const double precision = prior_precision + data_precision;
  return {(priors.mu0 * prior_precision + sample_mean * data_precision) / precision,
          1.0 / precision};
}

InverseGammaParams sigma_sq_conditional(double mu, std::span<const double> x_star,
                                        const Priors& priors) {
  double ss = 0.0;
  for (double x : x_star) ss += (x - mu) * (x - mu);
  return {priors.alpha0 + 0.5 * static_cast<double>(x_star.size()), priors.beta0 + 0.5 * ss};
}

double sample_mu_conditional(RngState& rng, double sigma_sq, const SummaryStats& stats,
                             const Priors& priors) {
  const auto post = mu_conditional(sigma_sq, stats.mean, stats.n, priors);
  return sample_normal(rng, post.mean, post.variance);
}

double sample_sigma_sq_conditional(RngState& rng, double mu, std::span<const double> x_star,
                                   const Priors& priors) {
  const auto post = sigma_sq_conditional(mu, x_star, priors);
  return sample_inverse_gamma(rng, post.shape, post.scale);
}

GibbsSampler::GibbsSampler(const SummaryStats& stats, const Priors& priors,
                           const SamplerConfig& config)
    : stats_(stats), priors_(priors), config_(config), ctx_(AugmentationContext::from(stats)),
      rng_(config.seed) {
  require_valid(priors);
  require_valid(config);
  state_.mu = config.init_mu.value_or(auto_init_mu(stats));
  state_.sigma_sq = config.init_sigma_sq.value_or(auto_init_sigma_sq(stats));
  state_.x_star.reserve(static_cast<std::size_t>(stats.n));
}

void GibbsSampler::step() {
  augment_into(rng_, ctx_, state_.sigma_sq, config_.mu_trunc_mode, state_.x_star);

  double conditioning_mean = stats_.mean;
  if (config_.mu_conditioning == MuConditioning::augmented) {
    conditioning_mean = std::accumulate(state_.x_star.begin(), state_.x_star.end(), 0.0) /
                        static_cast<double>(state_.x_star.size());
  }
  const auto mu_post = mu_conditional(state_.sigma_sq, conditioning_mean, stats_.n, priors_);
  state_.mu = sample_normal(rng_, mu_post.mean, mu_post.variance);

  state_.sigma_sq = sample_sigma_sq_conditional(rng_, state_.mu, state_.x_star, priors_);
  assert(state_.sigma_sq > 0.0);
  ++iteration_;
}

Chain run_gibbs(const SummaryStats& stats, const Priors& priors, const SamplerConfig& config) {
  if (config.method != Method::gibbs) {
    throw ValidationError("run_gibbs: config.method must be gibbs");
  }
  GibbsSampler sampler(stats, priors, config);
  Chain chain;
  chain.config = config;
  chain.draws.reserve(static_cast<std::size_t>(config.iterations));
  for (std::int64_t t = 0; t < config.iterations; ++t) {
    try {
      sampler.step();
    } catch (const NumericalError& e) {
      throw NumericalError("gibbs iteration " + std::to_string(t + 1) + ": " + e.what());
    } catch (const std::domain_error& e) {
      throw NumericalError("gibbs iteration " + std::to_string(t + 1) + ": " + e.what());
    }
    chain.draws.push_back({sampler.state().mu, sampler.state().sigma_sq});
  }
  return chain;
}

}  // namespace sumnorm

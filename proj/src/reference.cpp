#include "sumnorm/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sumnorm/augmentation.hpp"
#include "sumnorm/distributions.hpp"
#include "sumnorm/errors.hpp"
#include "sumnorm/normal.hpp"

namespace sumnorm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_order_stat_args(std::int64_t n, double sigma_sq) {
  if (n < 1) throw std::domain_error("order-statistic density: n must be at least 1");
  if (!(sigma_sq > 0.0)) {
    throw std::domain_error("order-statistic density: sigma_sq must be positive");
  }
}

double log_extreme_density(double log_tail, double x, std::int64_t n, double mu,
                           double sigma_sq) {
  const double log_phi = normal_logpdf(x, mu, sigma_sq);
  if (n == 1) return log_phi;
  if (log_tail == kNegInf) return kNegInf;
  return std::log(static_cast<double>(n)) + static_cast<double>(n - 1) * log_tail + log_phi;
}

}  // namespace

double log_min_density(double x, std::int64_t n, double mu, double sigma_sq) {
  check_order_stat_args(n, sigma_sq);
  const double z = (x - mu) / std::sqrt(sigma_sq);
  return log_extreme_density(stdnormal::log_sf(z), x, n, mu, sigma_sq);
}

double log_max_density(double x, std::int64_t n, double mu, double sigma_sq) {
  check_order_stat_args(n, sigma_sq);
  const double z = (x - mu) / std::sqrt(sigma_sq);
  return log_extreme_density(stdnormal::log_cdf(z), x, n, mu, sigma_sq);
}

LikelihoodTerms likelihood_terms(const SummaryStats& stats, double mu, double sigma_sq) {
  if (!(sigma_sq > 0.0)) throw std::domain_error("likelihood: sigma_sq must be positive");
  LikelihoodTerms terms{kNegInf, log_min_density(stats.min, stats.n, mu, sigma_sq),
                        log_max_density(stats.max, stats.n, mu, sigma_sq)};
  const double adj = adjusted_mean(stats);
  const double slack = kFeasibilityTolerance * (stats.max - stats.min);
  if (adj < stats.min - slack || adj > stats.max + slack) return terms;
  const TruncatedNormalParams tn{mu, sigma_sq / static_cast<double>(stats.n - 2), stats.min,
                                 stats.max};
  try {
    terms.adjusted_mean = truncated_normal_logpdf(std::clamp(adj, stats.min, stats.max), tn);
  } catch (const FarTailError&) {
    terms.adjusted_mean = kNegInf;
  }
  return terms;
}

double log_likelihood(const SummaryStats& stats, double mu, double sigma_sq) {
  return likelihood_terms(stats, mu, sigma_sq).total();
}

double log_prior(const Priors& priors, double mu, double sigma_sq) {
  return normal_logpdf(mu, priors.mu0, priors.tau0_sq) +
         inverse_gamma_logpdf(sigma_sq, priors.alpha0, priors.beta0);
}

double log_posterior(const SummaryStats& stats, const Priors& priors, double mu,
                     double log_sigma_sq) {
  const double sigma_sq = std::exp(log_sigma_sq);
  if (!std::isfinite(mu) || !(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) return kNegInf;
  const double value = log_likelihood(stats, mu, sigma_sq) + log_prior(priors, mu, sigma_sq) +
                       log_sigma_sq;
  return std::isnan(value) ? kNegInf : value;
}

bool metropolis_accept(RngState& rng, double log_ratio) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  return std::log(rng.uniform()) < log_ratio;
}

RandomWalkResult random_walk_metropolis(const LogDensity2& log_density,
                                        std::array<double, 2> init,
                                        const RandomWalkOptions& options, RngState& rng) {
  RandomWalkResult result;
  auto scales = options.scales;
  auto current = init;
  double current_ld = log_density(current[0], current[1]);

  auto propose = [&]() {
    const std::array<double, 2> next{current[0] + scales[0] * sample_standard_normal(rng),
                                     current[1] + scales[1] * sample_standard_normal(rng)};
    const double next_ld = log_density(next[0], next[1]);
    // From a -inf start every finite proposal is an improvement.
    const double log_ratio = current_ld == kNegInf ? (next_ld == kNegInf ? kNegInf : 0.0)
                                                   : next_ld - current_ld;
    if (metropolis_accept(rng, log_ratio)) {
      current = next;
      current_ld = next_ld;
      return true;
    }
    return false;
  };

  if (options.pilot_iterations > 0) {
    std::int64_t accepted = 0;
    for (std::int64_t i = 0; i < options.pilot_iterations; ++i) accepted += propose() ? 1 : 0;
    const double rate =
        static_cast<double>(accepted) / static_cast<double>(options.pilot_iterations);
    result.pilot_acceptance = rate;
    if (rate < options.acceptance_band_lo || rate > options.acceptance_band_hi) {
      const double clamped = std::clamp(rate, 0.005, 0.995);
      const double factor = std::clamp(stdnormal::quantile(0.5 * options.target_acceptance) /
                                           stdnormal::quantile(0.5 * clamped),
                                       0.1, 10.0);
      scales[0] *= factor;
      scales[1] *= factor;
    }
  }
  result.final_scales = scales;

  result.states.reserve(static_cast<std::size_t>(options.iterations));
  result.accepted.reserve(static_cast<std::size_t>(options.iterations));
  for (std::int64_t i = 0; i < options.iterations; ++i) {
    result.accepted.push_back(propose());
    result.states.push_back(current);
  }
  return result;
}

Chain run_metropolis(const SummaryStats& stats, const Priors& priors,
                     const SamplerConfig& config) {
  if (config.method != Method::metropolis) {
    throw ValidationError("run_metropolis: config.method must be metropolis");
  }
  require_valid(stats);
  require_valid(priors);
  require_valid(config);

  const double init_mu = config.init_mu.value_or(auto_init_mu(stats));
  const double init_sigma_sq = config.init_sigma_sq.value_or(auto_init_sigma_sq(stats));
  const double n = static_cast<double>(stats.n);

  RandomWalkOptions options;
  options.iterations = config.iterations;
  options.pilot_iterations = config.mh_pilot_iterations;
  options.scales = {config.mh_step_scale * std::sqrt(init_sigma_sq / n),
                    config.mh_step_scale * 0.9 / std::log(n)};

  RngState rng(config.seed);
  const auto target = [&](double mu, double log_sigma_sq) {
    return log_posterior(stats, priors, mu, log_sigma_sq);
  };
  const auto walk =
      random_walk_metropolis(target, {init_mu, std::log(init_sigma_sq)}, options, rng);

  Chain chain;
  chain.config = config;
  chain.draws.reserve(walk.states.size());
  for (const auto& s : walk.states) chain.draws.push_back({s[0], std::exp(s[1])});

  const auto burn = static_cast<std::size_t>(config.burn_in);
  std::size_t kept = 0, accepted = 0;
  for (std::size_t i = burn; i < walk.accepted.size(); ++i) {
    ++kept;
    accepted += walk.accepted[i] ? 1 : 0;
  }
  const double rate = kept ? static_cast<double>(accepted) / static_cast<double>(kept) : 0.0;
  chain.acceptance_rate = rate;
  if (rate < 0.01 || rate > 0.99) {
    chain.warnings.push_back("metropolis acceptance rate " + std::to_string(rate) +
                             " after burn-in is outside [0.01, 0.99]");
  }
  return chain;
}

}  // namespace sumnorm

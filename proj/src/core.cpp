#include "sumnorm/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sumnorm/errors.hpp"

namespace sumnorm {

std::string_view to_string(Method method) {
  return method == Method::gibbs ? "gibbs" : "metropolis";
}

std::optional<Method> parse_method(std::string_view text) {
  if (text == "gibbs") return Method::gibbs;
  if (text == "metropolis") return Method::metropolis;
  return std::nullopt;
}

std::string_view to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::non_finite:
      return "NON_FINITE";
    case ViolationCode::n_too_small:
      return "N_TOO_SMALL";
    case ViolationCode::min_ge_max:
      return "MIN_GE_MAX";
    case ViolationCode::mean_out_of_range:
      return "MEAN_OUT_OF_RANGE";
    case ViolationCode::infeasible_adj_mean:
      return "INFEASIBLE_ADJ_MEAN";
  }
  return "UNKNOWN";
}

std::vector<Violation> validate(const SummaryStats& s) {
  std::vector<Violation> out;
  auto add = [&out](ViolationCode code, std::string message) {
    out.push_back({code, std::move(message)});
  };
  if (!std::isfinite(s.mean) || !std::isfinite(s.min) || !std::isfinite(s.max)) {
    add(ViolationCode::non_finite, "mean, min and max must be finite");
    return out;
  }
  if (s.n < 3) {
    add(ViolationCode::n_too_small,
        "n = " + std::to_string(s.n) + ": at least 3 observations are required");
  }
  if (!(s.min < s.max)) add(ViolationCode::min_ge_max, "min must be strictly below max");
  const bool mean_in_range = s.mean >= s.min && s.mean <= s.max;
  if (!mean_in_range) add(ViolationCode::mean_out_of_range, "mean must lie within [min, max]");
  // An out-of-range mean always implies an out-of-range adjusted mean, so
  // only the root cause is reported.
  if (s.n >= 3 && s.min < s.max && mean_in_range) {
    const double n = static_cast<double>(s.n);
    const double adj = (n * s.mean - s.min - s.max) / (n - 2.0);
    const double slack = kFeasibilityTolerance * (s.max - s.min);
    if (!(adj >= s.min - slack && adj <= s.max + slack)) {
      std::ostringstream os;
      os.precision(17);
      os << "adjusted mean " << adj << " of the " << s.n - 2
         << " intermediate values falls outside [min, max]";
      add(ViolationCode::infeasible_adj_mean, os.str());
    }
  }
  return out;
}

void require_valid(const SummaryStats& stats) {
  const auto violations = validate(stats);
  if (violations.empty()) return;
  std::string message = "invalid summary statistics:";
  for (const auto& v : violations) {
    message += " ";
    message += to_string(v.code);
    message += " (" + v.message + ");";
  }
  message.pop_back();
  throw ValidationError(message);
}

void require_valid(const Priors& p) {
  if (!std::isfinite(p.mu0)) throw ValidationError("priors: mu0 must be finite");
  if (!(p.tau0_sq > 0.0) || !std::isfinite(p.tau0_sq)) {
    throw ValidationError("priors: tau0_sq must be positive");
  }
  if (!(p.alpha0 > 0.0) || !std::isfinite(p.alpha0)) {
    throw ValidationError("priors: alpha0 must be positive");
  }
  if (!(p.beta0 > 0.0) || !std::isfinite(p.beta0)) {
    throw ValidationError("priors: beta0 must be positive");
  }
}

void require_valid(const SamplerConfig& c) {
  if (c.iterations <= 0) throw ValidationError("config: iterations must be positive");
  if (c.burn_in < 0 || c.burn_in >= c.iterations) {
    throw ValidationError("config: burn_in must satisfy 0 <= burn_in < iterations");
  }
  if (c.thin < 1) throw ValidationError("config: thin must be at least 1");
  if (c.init_mu && !std::isfinite(*c.init_mu)) {
    throw ValidationError("config: init_mu must be finite");
  }
  if (c.init_sigma_sq && !(*c.init_sigma_sq > 0.0 && std::isfinite(*c.init_sigma_sq))) {
    throw ValidationError("config: init_sigma_sq must be positive");
  }
  if (!(c.mh_step_scale > 0.0) || !std::isfinite(c.mh_step_scale)) {
    throw ValidationError("config: mh_step_scale must be positive");
  }
  if (c.mh_pilot_iterations < 0) {
    throw ValidationError("config: mh_pilot_iterations must be nonnegative");
  }
}

double auto_init_mu(const SummaryStats& stats) { return stats.mean; }

double auto_init_sigma_sq(const SummaryStats& stats) {
  const double quarter_range = (stats.max - stats.min) / 4.0;
  return quarter_range * quarter_range;
}

std::vector<Draw> retained_draws(const Chain& chain) {
  std::vector<Draw> kept;
  const auto burn = static_cast<std::size_t>(std::max<std::int64_t>(chain.config.burn_in, 0));
  const auto thin = static_cast<std::size_t>(std::max<std::int64_t>(chain.config.thin, 1));
  for (std::size_t i = burn; i < chain.draws.size(); i += thin) kept.push_back(chain.draws[i]);
  if (kept.size() < kMinRetainedDraws) {
    throw ValidationError("summarize: only " + std::to_string(kept.size()) +
                          " retained draws; at least " + std::to_string(kMinRetainedDraws) +
                          " are required");
  }
  return kept;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of empty data");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double effective_sample_size(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += (x[i] - mean) * (x[i + lag] - mean);
    return acc / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return static_cast<double>(n);

  // Initial positive sequence of pair sums, made monotone.
  double sum_pairs = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    double pair = (autocov(lag) + autocov(lag + 1)) / c0;
    if (!(pair > 0.0)) break;
    pair = std::min(pair, previous);
    previous = pair;
    sum_pairs += pair;
  }
  const double tau = -1.0 + 2.0 * sum_pairs;
  const double size = static_cast<double>(n);
  if (!(tau > 1.0)) return size;
  return size / tau;
}

double split_rhat(const std::vector<double>& x) {
  const std::size_t half = x.size() / 2;
  if (half < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t offset = x.size() - half;  // drop the middle draw when odd
  double means[2] = {0.0, 0.0};
  double vars[2] = {0.0, 0.0};
  for (int part = 0; part < 2; ++part) {
    const std::size_t start = part == 0 ? 0 : offset;
    for (std::size_t i = 0; i < half; ++i) means[part] += x[start + i];
    means[part] /= static_cast<double>(half);
    for (std::size_t i = 0; i < half; ++i) {
      const double d = x[start + i] - means[part];
      vars[part] += d * d;
    }
    vars[part] /= static_cast<double>(half - 1);
  }
  const double h = static_cast<double>(half);
  const double within = 0.5 * (vars[0] + vars[1]);
  const double grand = 0.5 * (means[0] + means[1]);
  const double between =
      h * ((means[0] - grand) * (means[0] - grand) + (means[1] - grand) * (means[1] - grand));
  if (!(within > 0.0)) return between > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  const double pooled = (h - 1.0) / h * within + between / h;
  return std::sqrt(pooled / within);
}

ParamSummary summarize_trace(const std::vector<double>& trace) {
  ParamSummary s;
  const double n = static_cast<double>(trace.size());
  s.post_mean = std::accumulate(trace.begin(), trace.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : trace) ss += (v - s.post_mean) * (v - s.post_mean);
  s.post_sd = trace.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  // Constant traces: keep the interval exactly at the value.
  if (ss == 0.0) s.post_mean = trace.front();
  s.ci_lower = quantile(trace, 0.025);
  s.ci_upper = quantile(trace, 0.975);
  s.ess = effective_sample_size(trace);
  s.rhat = split_rhat(trace);
  return s;
}

PosteriorSummary summarize(const Chain& chain) {
  const auto kept = retained_draws(chain);
  std::vector<double> mu, sigma;
  mu.reserve(kept.size());
  sigma.reserve(kept.size());
  for (const auto& d : kept) {
    mu.push_back(d.mu);
    sigma.push_back(std::sqrt(d.sigma_sq));
  }
  return {summarize_trace(mu), summarize_trace(sigma), kept.size()};
}

}  // namespace sumnorm

#pragma once

#include <cmath>

#include "sumnorm/rng.hpp"

namespace sumnorm {

double sample_standard_normal(RngState& rng);
double sample_normal(RngState& rng, double mu, double sigma_sq);
double sample_exponential(RngState& rng, double rate);

// ---------------------------------------------------------------------------
// Truncated normal TN(mu, sigma_sq, a, b)
// ---------------------------------------------------------------------------

struct TruncatedNormalParams {
  double mu = 0.0;
  double sigma_sq = 1.0;
  double a = -INFINITY;
  double b = INFINITY;

  double sigma() const { return std::sqrt(sigma_sq); }
  double alpha() const { return (a - mu) / sigma(); }
  double beta() const { return (b - mu) / sigma(); }

  /// Throws std::domain_error unless sigma_sq > 0 and a < b.
  void validate() const;
};

/// Zero outside [a, b]. Throws FarTailError if the truncation mass is not
/// representable even in log space.
double truncated_normal_pdf(double x, const TruncatedNormalParams& params);
double truncated_normal_logpdf(double x, const TruncatedNormalParams& params);
double truncated_normal_cdf(double x, const TruncatedNormalParams& params);

/// mu + sigma * (phi(alpha) - phi(beta)) / (Phi(beta) - Phi(alpha)) with
/// standardized bounds. When the mass drops below 1e-300 the ratio is taken
/// from Mills-ratio tail expansions instead of CDF differences. The result
/// is always strictly inside (a, b).
double truncated_normal_mean(const TruncatedNormalParams& params);

/// Standardized shift (phi(alpha) - phi(beta)) / (Phi(beta) - Phi(alpha)).
double truncated_normal_shift(double alpha, double beta);

enum class TruncationRegime {
  naive,        // draw from the parent and reject; used when mass >= 1%
  exponential,  // translated-exponential proposal for a single far tail
  uniform,      // uniform proposal on a narrow far interval
};

const char* to_string(TruncationRegime regime);

/// Rejection sampler with the regime chosen once at construction, so a
/// sampler can be reused for many draws with the same parameters.
///
/// Every regime has bounded expected work. After kMaxAttempts consecutive
/// rejections the draw falls back to log-space CDF inversion, so no call
/// loops indefinitely.
class TruncatedNormalSampler {
 public:
  static constexpr int kMaxAttempts = 1 << 16;

  explicit TruncatedNormalSampler(const TruncatedNormalParams& params);

  double operator()(RngState& rng) const;

  TruncationRegime regime() const { return regime_; }
  const TruncatedNormalParams& params() const { return params_; }

 private:
  // Standardized draw, expressed as an offset above lo_ (tail regimes) or
  // as the value itself (naive regime).
  double draw_standard(RngState& rng) const;
  double invert_standard(double u) const;

  TruncatedNormalParams params_;
  double sigma_;
  TruncationRegime regime_;
  bool reflected_;  // sampling on [-beta, -alpha], negated on return
  double lo_, hi_;  // standardized bounds after reflection
  double width_;    // (b - a) / sigma, computed without cancellation
  double rate_;     // exponential proposal rate
};

double sample_truncated_normal(RngState& rng, const TruncatedNormalParams& params);

// ---------------------------------------------------------------------------
// Gamma / inverse gamma
// ---------------------------------------------------------------------------

/// Gamma(shape, rate) by Marsaglia-Tsang squeeze rejection; shape < 1 is
/// boosted via Gamma(shape + 1) * U^(1/shape).
double sample_gamma(RngState& rng, double shape, double rate);

/// InvGamma(shape, scale), density scale^shape / Gamma(shape) x^-(shape+1)
/// exp(-scale / x). Drawn as 1 / Gamma(shape, rate = scale).
double sample_inverse_gamma(RngState& rng, double shape, double scale);

double inverse_gamma_logpdf(double x, double shape, double scale);

}  // namespace sumnorm

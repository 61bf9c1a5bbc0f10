#include "sumnorm/distributions.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "sumnorm/errors.hpp"
#include "sumnorm/normal.hpp"

namespace sumnorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvSqrt2 = 0.70710678118654752440;
// Below this mass the pdf/cdf-difference ratio is replaced by Mills ratios.
constexpr double kTinyMass = 1e-300;
// Parent mass above which plain draw-and-reject is used.
constexpr double kNaiveMass = 0.01;

std::string describe(const TruncatedNormalParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "TN(mu=" << p.mu << ", sigma_sq=" << p.sigma_sq << ", a=" << p.a << ", b=" << p.b
     << ")";
  return os.str();
}

double log_mass_or_throw(const TruncatedNormalParams& p) {
  const double log_mass = stdnormal::log_interval_mass(p.alpha(), p.beta());
  if (!std::isfinite(log_mass)) {
    throw FarTailError("truncated normal: truncation mass underflows in log space for " +
                       describe(p) + " (standardized bounds " + std::to_string(p.alpha()) +
                       ", " + std::to_string(p.beta()) + ")");
  }
  return log_mass;
}

// Robert (1995): a translated exponential beats a uniform proposal on
// [lo, hi] (lo >= 0) once the interval is wider than this.
double exponential_width_threshold(double lo) {
  const double root = std::sqrt(lo * lo + 4.0);
  return 2.0 * std::sqrt(std::numbers::e) / (lo + root) * std::exp((lo * lo - lo * root) / 4.0);
}

void check_positive(const char* what, double shape, double second) {
  if (!(shape > 0.0) || !(second > 0.0) || !std::isfinite(shape) || !std::isfinite(second)) {
    throw std::domain_error(std::string(what) + ": parameters must be positive and finite");
  }
}

}  // namespace

double sample_standard_normal(RngState& rng) { return stdnormal::quantile(rng.uniform()); }

double sample_normal(RngState& rng, double mu, double sigma_sq) {
  if (!(sigma_sq > 0.0)) throw std::domain_error("sample_normal: variance must be positive");
  return mu + std::sqrt(sigma_sq) * sample_standard_normal(rng);
}

double sample_exponential(RngState& rng, double rate) {
  if (!(rate > 0.0)) throw std::domain_error("sample_exponential: rate must be positive");
  return -std::log(rng.uniform()) / rate;
}

void TruncatedNormalParams::validate() const {
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
    throw std::domain_error("truncated normal: sigma_sq must be positive, " + describe(*this));
  }
  if (!std::isfinite(mu) || std::isnan(a) || std::isnan(b) || !(a < b)) {
    throw std::domain_error("truncated normal: requires finite mu and a < b, " +
                            describe(*this));
  }
}

double truncated_normal_logpdf(double x, const TruncatedNormalParams& params) {
  params.validate();
  const double log_mass = log_mass_or_throw(params);
  if (x < params.a || x > params.b) return -kInf;
  const double z = (x - params.mu) / params.sigma();
  return -0.5 * z * z - stdnormal::kLogSqrt2Pi - 0.5 * std::log(params.sigma_sq) - log_mass;
}

double truncated_normal_pdf(double x, const TruncatedNormalParams& params) {
  return std::exp(truncated_normal_logpdf(x, params));
}

double truncated_normal_cdf(double x, const TruncatedNormalParams& params) {
  params.validate();
  const double log_mass = log_mass_or_throw(params);
  if (x <= params.a) return 0.0;
  if (x >= params.b) return 1.0;
  const double z = (x - params.mu) / params.sigma();
  return std::min(1.0, std::exp(stdnormal::log_interval_mass(params.alpha(), z) - log_mass));
}

double truncated_normal_shift(double alpha, double beta) {
  if (beta <= 0.0) return -truncated_normal_shift(-beta, -alpha);
  if (alpha < 0.0) {
    const double mass = 0.5 * (std::erf(beta * kInvSqrt2) - std::erf(alpha * kInvSqrt2));
    return (stdnormal::pdf(alpha) - stdnormal::pdf(beta)) / mass;
  }
  // Upper side: 0 <= alpha < beta.
  const double log_mass = stdnormal::log_interval_mass(alpha, beta);
  if (log_mass > std::log(kTinyMass)) {
    return (stdnormal::pdf(alpha) - stdnormal::pdf(beta)) / std::exp(log_mass);
  }
  // Divide through by phi(alpha):
  //   (1 - e^-d) / (R(alpha) - R(beta) e^-d),  d = (beta^2 - alpha^2) / 2.
  const double d = 0.5 * (beta - alpha) * (beta + alpha);
  const double decay = std::exp(-d);
  const double num = -std::expm1(-d);
  const double den = stdnormal::mills_ratio(alpha) - stdnormal::mills_ratio(beta) * decay;
  if (!(den > 0.0)) return 0.5 * (alpha + beta);  // interval too narrow to resolve
  return num / den;
}

double truncated_normal_mean(const TruncatedNormalParams& params) {
  params.validate();
  log_mass_or_throw(params);
  const double alpha = params.alpha();
  const double beta = params.beta();
  double mean = params.mu + params.sigma() * truncated_normal_shift(alpha, beta);
  if (std::isnan(mean)) {
    throw NumericalError("truncated_normal_mean: non-finite result for " + describe(params));
  }
  if (mean <= params.a) mean = std::nextafter(params.a, params.b);
  if (mean >= params.b) mean = std::nextafter(params.b, params.a);
  return mean;
}

const char* to_string(TruncationRegime regime) {
  switch (regime) {
    case TruncationRegime::naive:
      return "naive";
    case TruncationRegime::exponential:
      return "exponential";
    case TruncationRegime::uniform:
      return "uniform";
  }
  return "unknown";
}

TruncatedNormalSampler::TruncatedNormalSampler(const TruncatedNormalParams& params)
    : params_(params), sigma_(0.0), regime_(TruncationRegime::naive), reflected_(false),
      lo_(0.0), hi_(0.0), width_(0.0), rate_(0.0) {
  params_.validate();
  const double log_mass = log_mass_or_throw(params_);
  sigma_ = params_.sigma();
  lo_ = params_.alpha();
  hi_ = params_.beta();
  width_ = (params_.b - params_.a) / sigma_;
  if (log_mass >= std::log(kNaiveMass)) {
    regime_ = TruncationRegime::naive;
    return;
  }
  if (hi_ <= 0.0) {
    reflected_ = true;
    std::tie(lo_, hi_) = std::pair(-hi_, -lo_);
  }
  if (lo_ >= 0.0 && width_ > exponential_width_threshold(lo_)) {
    regime_ = TruncationRegime::exponential;
    rate_ = 0.5 * (lo_ + std::sqrt(lo_ * lo_ + 4.0));
  } else {
    regime_ = TruncationRegime::uniform;
  }
}

double TruncatedNormalSampler::draw_standard(RngState& rng) const {
  switch (regime_) {
    case TruncationRegime::naive:
      for (int i = 0; i < kMaxAttempts; ++i) {
        const double z = sample_standard_normal(rng);
        if (z >= lo_ && z <= hi_) return z;
      }
      return invert_standard(rng.uniform());
    case TruncationRegime::exponential:
      for (int i = 0; i < kMaxAttempts; ++i) {
        const double offset = -std::log(rng.uniform()) / rate_;
        if (offset > width_) continue;
        const double t = lo_ + offset - rate_;
        if (rng.uniform() <= std::exp(-0.5 * t * t)) return offset;
      }
      break;
    case TruncationRegime::uniform:
      for (int i = 0; i < kMaxAttempts; ++i) {
        const double offset = width_ * rng.uniform();
        // log acceptance relative to the density peak on [lo, hi]
        const double z = lo_ + offset;
        const double log_accept = lo_ > 0.0 ? -0.5 * offset * (lo_ + z) : -0.5 * z * z;
        if (std::log(rng.uniform()) <= log_accept) return offset;
      }
      break;
  }
  return invert_standard(rng.uniform()) - lo_;
}

double TruncatedNormalSampler::invert_standard(double u) const {
  // Bisection on log F(z) = log u, F the truncated CDF on [lo, hi].
  const double log_total = stdnormal::log_interval_mass(lo_, hi_);
  const double target = std::log(u);
  double left = std::isfinite(lo_) ? lo_ : std::min(hi_, 0.0) - 40.0;
  double right = std::isfinite(hi_) ? hi_ : std::max(lo_, 0.0) + 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (left + right);
    if (mid == left || mid == right) break;
    if (stdnormal::log_interval_mass(lo_, mid) - log_total < target) {
      left = mid;
    } else {
      right = mid;
    }
  }
  return 0.5 * (left + right);
}

double TruncatedNormalSampler::operator()(RngState& rng) const {
  const double draw = draw_standard(rng);
  double x;
  if (regime_ == TruncationRegime::naive) {
    x = params_.mu + sigma_ * draw;
  } else if (reflected_) {
    x = params_.b - sigma_ * draw;
  } else {
    x = params_.a + sigma_ * draw;
  }
  x = std::clamp(x, params_.a, params_.b);
  assert(x >= params_.a && x <= params_.b);
  return x;
}

double sample_truncated_normal(RngState& rng, const TruncatedNormalParams& params) {
  return TruncatedNormalSampler(params)(rng);
}

double sample_gamma(RngState& rng, double shape, double rate) {
  check_positive("sample_gamma", shape, rate);
  if (shape < 1.0) {
    const double boosted = sample_gamma(rng, shape + 1.0, 1.0);
    const double log_x = std::log(boosted) + std::log(rng.uniform()) / shape;
    return std::max(std::exp(log_x), std::numeric_limits<double>::min()) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double sample_inverse_gamma(RngState& rng, double shape, double scale) {
  check_positive("sample_inverse_gamma", shape, scale);
  return 1.0 / sample_gamma(rng, shape, scale);
}

double inverse_gamma_logpdf(double x, double shape, double scale) {
  check_positive("inverse_gamma_logpdf", shape, scale);
  if (!(x > 0.0)) return -kInf;
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

}  // namespace sumnorm

#include "sumnorm/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sumnorm {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_variance(double sigma_sq) {
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
    throw std::domain_error("normal: variance must be positive and finite, got " +
                            std::to_string(sigma_sq));
  }
}

}  // namespace

namespace stdnormal {

double pdf(double z) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double cdf(double z) noexcept { return 0.5 * std::erfc(-z * kInvSqrt2); }

double sf(double z) noexcept { return 0.5 * std::erfc(z * kInvSqrt2); }

double mills_ratio(double z) noexcept {
  if (z == kInf) return 0.0;
  if (z < 8.0) return sf(z) / pdf(z);
  // Laplace continued fraction 1/(z + 1/(z + 2/(z + 3/(z + ...)))).
  double t = z;
  for (int k = 60; k >= 1; --k) t = z + k / t;
  return 1.0 / t;
}

double log_cdf(double z) noexcept {
  if (std::isnan(z)) return z;
  if (z > 6.0) return std::log1p(-sf(z));
  if (z > -20.0) return std::log(cdf(z));
  if (z == -kInf) return -kInf;
  return -0.5 * z * z - kLogSqrt2Pi + std::log(mills_ratio(-z));
}

double log_sf(double z) noexcept { return log_cdf(-z); }

double log_interval_mass(double lo, double hi) noexcept {
  if (!(lo < hi)) return -kInf;
  if (lo >= 0.0) {
    const double l_lo = log_sf(lo);
    const double l_hi = log_sf(hi);
    if (l_hi == -kInf) return l_lo;
    return l_lo + std::log(-std::expm1(l_hi - l_lo));
  }
  if (hi <= 0.0) {
    const double l_hi = log_cdf(hi);
    const double l_lo = log_cdf(lo);
    if (l_lo == -kInf) return l_hi;
    return l_hi + std::log(-std::expm1(l_lo - l_hi));
  }
  // lo < 0 < hi: erf terms have opposite signs, so the difference is a sum.
  return std::log(0.5 * (std::erf(hi * kInvSqrt2) - std::erf(lo * kInvSqrt2)));
}

double quantile(double p) noexcept {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r +
                  0.24178072517745061177) * r + 1.27045825245236838258) * r +
                3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734) /
            (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r +
                  0.0151986665636164571966) * r + 0.14810397642748007459) * r +
                0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r +
                  0.0012426609473880784386) * r + 0.026532189526576123093) * r +
                0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772) /
            (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r +
                  1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
                0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

}  // namespace stdnormal

double normal_pdf(double x, double mu, double sigma_sq) {
  check_variance(sigma_sq);
  const double d = x - mu;
  return std::exp(-0.5 * d * d / sigma_sq) / std::sqrt(2.0 * std::numbers::pi * sigma_sq);
}

double normal_logpdf(double x, double mu, double sigma_sq) {
  check_variance(sigma_sq);
  const double d = x - mu;
  return -0.5 * d * d / sigma_sq - stdnormal::kLogSqrt2Pi - 0.5 * std::log(sigma_sq);
}

double normal_cdf(double x, double mu, double sigma_sq) {
  check_variance(sigma_sq);
  return stdnormal::cdf((x - mu) / std::sqrt(sigma_sq));
}

double normal_quantile(double p, double mu, double sigma_sq) {
  check_variance(sigma_sq);
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1), got " + std::to_string(p));
  }
  return mu + std::sqrt(sigma_sq) * stdnormal::quantile(p);
}

}  // namespace sumnorm

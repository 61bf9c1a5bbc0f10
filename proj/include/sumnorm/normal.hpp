#pragma once

// Normal density, distribution and quantile functions, plus the tail-stable
// standard-normal helpers the truncated-normal code is built on.
//
// Functions taking (mu, sigma_sq) throw std::domain_error when
// sigma_sq <= 0 (or is not finite).

namespace sumnorm {

double normal_pdf(double x, double mu, double sigma_sq);
double normal_logpdf(double x, double mu, double sigma_sq);
double normal_cdf(double x, double mu, double sigma_sq);

/// Inverse of normal_cdf; p must lie in the open interval (0, 1).
double normal_quantile(double p, double mu, double sigma_sq);

namespace stdnormal {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double pdf(double z) noexcept;
double cdf(double z) noexcept;
/// Upper tail 1 - cdf(z), without cancellation for large z.
double sf(double z) noexcept;
/// log cdf(z); finite down to z ~ -1e154.
double log_cdf(double z) noexcept;
/// log sf(z).
double log_sf(double z) noexcept;
/// Mills ratio sf(z) / pdf(z) for z >= 0.
double mills_ratio(double z) noexcept;
/// Wichura's AS 241 (PPND16) rational approximation; p in (0, 1).
double quantile(double p) noexcept;

/// log(cdf(hi) - cdf(lo)) for lo <= hi, evaluated on the side of zero
/// where the difference does not cancel. Returns -inf only when the mass
/// is not representable in log space.
double log_interval_mass(double lo, double hi) noexcept;

}  // namespace stdnormal

}  // namespace sumnorm

#include "sumnorm/augmentation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sumnorm/distributions.hpp"
#include "sumnorm/errors.hpp"
#include "sumnorm/normal.hpp"

namespace sumnorm {

double adjusted_mean(const SummaryStats& stats) {
  if (stats.n < 3) {
    throw std::domain_error("adjusted_mean: n must be at least 3, got " + std::to_string(stats.n));
  }
  const double n = static_cast<double>(stats.n);
  return (n * stats.mean - stats.min - stats.max) / (n - 2.0);
}

std::pair<double, double> centered_bounds(const SummaryStats& stats) {
  const double adj = adjusted_mean(stats);
  return {stats.min - adj, stats.max - adj};
}

AugmentationContext AugmentationContext::from(const SummaryStats& stats) {
  require_valid(stats);
  AugmentationContext ctx;
  ctx.x_bar_adj = adjusted_mean(stats);
  ctx.a_star = stats.min - ctx.x_bar_adj;
  ctx.b_star = stats.max - ctx.x_bar_adj;
  ctx.n_missing = stats.n - 2;
  ctx.min = stats.min;
  ctx.max = stats.max;
  return ctx;
}

namespace {

void check_bounds(double sigma_sq, double a_star, double b_star) {
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
    throw std::domain_error("mu_trunc: sigma_sq must be positive");
  }
  if (!(a_star < b_star) || !std::isfinite(a_star) || !std::isfinite(b_star)) {
    throw std::domain_error("mu_trunc: requires finite a_star < b_star");
  }
}

}  // namespace

double one_shot_mu_trunc(double sigma_sq, double a_star, double b_star) {
  check_bounds(sigma_sq, a_star, b_star);
  const double sigma = std::sqrt(sigma_sq);
  return -sigma * truncated_normal_shift(a_star / sigma, b_star / sigma);
}

double solve_mu_trunc(double sigma_sq, double a_star, double b_star) {
  check_bounds(sigma_sq, a_star, b_star);
  const double sigma = std::sqrt(sigma_sq);
  const double width = b_star - a_star;
  const double slack = kFeasibilityTolerance * width;
  if (a_star > slack || b_star < -slack) {
    std::ostringstream os;
    os.precision(17);
    os << "solve_mu_trunc: centered bounds [" << a_star << ", " << b_star
       << "] do not contain 0, no location gives a zero truncated mean";
    throw NumericalError(os.str());
  }

  // Truncated mean at location m, strictly increasing in m.
  auto f = [&](double m) { return m + sigma * truncated_normal_shift((a_star - m) / sigma,
                                                                      (b_star - m) / sigma); };
  const double tol = 1e-13 * std::max(sigma, 1.0);

  // The bracket may need to grow when sigma is large against the width or
  // when a bound sits close to zero.
  double reach = 50.0 * sigma;
  double lo = a_star - reach;
  double f_lo = f(lo);
  for (int i = 0; i < 64 && f_lo >= 0.0; ++i) {
    reach *= 4.0;
    lo = a_star - reach;
    f_lo = f(lo);
  }
  if (f_lo >= 0.0) return lo;
  reach = 50.0 * sigma;
  double hi = b_star + reach;
  double f_hi = f(hi);
  for (int i = 0; i < 64 && f_hi <= 0.0; ++i) {
    reach *= 4.0;
    hi = b_star + reach;
    f_hi = f(hi);
  }
  if (f_hi <= 0.0) return hi;
  if (std::isnan(f_lo) || std::isnan(f_hi)) {
    throw NumericalError("solve_mu_trunc: truncated mean is not finite on the bracket");
  }

  // Illinois regula falsi, with a bisection step every third iteration.
  int side = 0;
  double best = std::fabs(f_lo) < std::fabs(f_hi) ? lo : hi;
  for (int iter = 0; iter < 400; ++iter) {
    double m = (iter % 3 == 2) ? 0.5 * (lo + hi) : (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    if (!(m > lo && m < hi)) m = 0.5 * (lo + hi);
    if (m <= lo || m >= hi) return best;  // bracket collapsed to adjacent doubles
    const double fm = f(m);
    if (std::isnan(fm)) throw NumericalError("solve_mu_trunc: truncated mean evaluated to NaN");
    best = m;
    if (std::fabs(fm) <= tol) return m;
    if (fm < 0.0) {
      lo = m;
      f_lo = fm;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = m;
      f_hi = fm;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
  }
  return best;
}

double mu_trunc(MuTruncMode mode, double sigma_sq, double a_star, double b_star) {
  return mode == MuTruncMode::root ? solve_mu_trunc(sigma_sq, a_star, b_star)
                                   : one_shot_mu_trunc(sigma_sq, a_star, b_star);
}

void augment_into(RngState& rng, const AugmentationContext& ctx, double sigma_sq,
                  MuTruncMode mode, std::vector<double>& x_star) {
  const double location = mu_trunc(mode, sigma_sq, ctx.a_star, ctx.b_star);
  const TruncatedNormalSampler sampler({location, sigma_sq, ctx.a_star, ctx.b_star});
  const auto n = static_cast<std::size_t>(ctx.n_missing + 2);
  x_star.resize(n);
  x_star.front() = ctx.min;
  x_star.back() = ctx.max;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    x_star[j] = std::clamp(sampler(rng) + ctx.x_bar_adj, ctx.min, ctx.max);
    assert(x_star[j] >= ctx.min && x_star[j] <= ctx.max);
  }
}

std::vector<double> augment(RngState& rng, const SummaryStats& stats, double sigma_sq,
                            MuTruncMode mode) {
  if (!(sigma_sq > 0.0)) throw std::domain_error("augment: sigma_sq must be positive");
  const auto ctx = AugmentationContext::from(stats);
  std::vector<double> x_star;
  augment_into(rng, ctx, sigma_sq, mode, x_star);
  return x_star;
}

}  // namespace sumnorm

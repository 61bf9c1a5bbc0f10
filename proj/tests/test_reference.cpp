#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "sumnorm/distributions.hpp"
#include "sumnorm/errors.hpp"
#include "sumnorm/gibbs.hpp"
#include "sumnorm/normal.hpp"
#include "sumnorm/reference.hpp"
#include "sumnorm/simulation.hpp"

using namespace sumnorm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SummaryStats synthetic(std::uint64_t seed, std::int64_t n, double mu, double sigma) {
  RngState rng(seed);
  return summarize_dataset(generate_dataset(rng, n, mu, sigma));
}

// Likelihood times prior evaluated without the library: the truncated
// normal factor and order-statistic densities from Boost and 50-digit erf.
double oracle_log_joint(const SummaryStats& s, const Priors& p, double mu, double s2) {
  const double n = static_cast<double>(s.n);
  const double adj = (n * s.mean - s.min - s.max) / (n - 2);
  const double v = s2 / (n - 2);
  const double tn = oracle::normal_pdf(adj, mu, v) /
                    (oracle::normal_cdf(s.max, mu, v) - oracle::normal_cdf(s.min, mu, v));
  const double f_min = n * std::pow(1 - oracle::normal_cdf(s.min, mu, s2), n - 1) *
                       oracle::normal_pdf(s.min, mu, s2);
  const double f_max = n * std::pow(oracle::normal_cdf(s.max, mu, s2), n - 1) *
                       oracle::normal_pdf(s.max, mu, s2);
  const double prior = oracle::normal_pdf(mu, p.mu0, p.tau0_sq) *
                       boost::math::pdf(
                           boost::math::inverse_gamma_distribution<double>(p.alpha0, p.beta0), s2);
  return std::log(tn * f_min * f_max * prior);
}

}  // namespace

TEST_CASE("order-statistic densities") {
  SUBCASE("n = 1 is the parent density") {
    for (double x : {-3.0, 0.2, 8.0}) {
      CHECK(log_min_density(x, 1, 0.5, 2.0) == doctest::Approx(normal_logpdf(x, 0.5, 2.0)).epsilon(1e-14));
      CHECK(log_max_density(x, 1, 0.5, 2.0) == doctest::Approx(normal_logpdf(x, 0.5, 2.0)).epsilon(1e-14));
    }
  }
  SUBCASE("reflection symmetry") {
    for (std::int64_t n : {2, 10, 1000}) {
      for (double t = -12; t <= 12; t += 0.37) {
        const double lhs = log_min_density(1.0 - t, n, 1.0, 3.0);
        const double rhs = log_max_density(1.0 + t, n, 1.0, 3.0);
        if (std::isfinite(rhs)) {
          CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        } else {
          CHECK(lhs == rhs);
        }
      }
    }
  }
  SUBCASE("normalization") {
    for (std::int64_t n : {2, 10, 100, 1000}) {
      CAPTURE(n);
      auto fmin = [&](double x) { return std::exp(log_min_density(x, n, 0.0, 1.0)); };
      auto fmax = [&](double x) { return std::exp(log_max_density(x, n, 0.0, 1.0)); };
      CHECK(oracle::integrate(fmin, -12, 12, 48) == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(oracle::integrate(fmax, -12, 12, 48) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  SUBCASE("closed form for small n") {
    for (double x : {-2.0, 0.0, 1.5}) {
      const double f = 2 * (1 - oracle::normal_cdf(x, 0, 1)) * oracle::normal_pdf(x, 0, 1);
      CHECK(std::exp(log_min_density(x, 2, 0, 1)) == doctest::Approx(f).epsilon(1e-12));
    }
  }
  SUBCASE("max-density mode for n = 100") {
    double best = -kInf, arg = 0;
    for (double x = 0; x <= 5; x += 0.001) {
      const double v = log_max_density(x, 100, 0, 1);
      if (v > best) {
        best = v;
        arg = x;
      }
    }
    CHECK(arg >= 2.0);
    CHECK(arg <= 2.8);
  }
  SUBCASE("min density vs simulated minima") {
    const std::size_t reps = 200000;
    const double sigma_sq = 25.0;
    RngState rng(61);
    const double lo = -25, width = 0.5;
    const int bins = 60;
    std::vector<double> observed(bins + 2, 0.0), expected(bins + 2, 0.0);
    for (std::size_t r = 0; r < reps; ++r) {
      double m = kInf;
      for (int i = 0; i < 10; ++i) m = std::min(m, 5.0 * sample_standard_normal(rng));
      const double k = std::floor((m - lo) / width);
      observed[k < 0 ? 0 : (k >= bins ? bins + 1 : static_cast<std::size_t>(k) + 1)] += 1;
    }
    auto f = [&](double x) { return std::exp(log_min_density(x, 10, 0, sigma_sq)); };
    expected[0] = oracle::integrate(f, -80, lo, 16) * reps;
    for (int k = 0; k < bins; ++k) {
      expected[k + 1] = oracle::integrate(f, lo + k * width, lo + (k + 1) * width) * reps;
    }
    expected[bins + 1] = oracle::integrate(f, lo + bins * width, 60, 16) * reps;
    CHECK(oracle::chi_square(observed, expected).p_value > 0.01);
  }
  CHECK_THROWS(log_min_density(0, 0, 0, 1));
  CHECK_THROWS(log_max_density(0, 5, 0, 0));
}

TEST_CASE("log likelihood") {
  const auto stats = synthetic(500, 500, 0.0, 5.0);
  SUBCASE("truth beats gross misfits") {
    const double at_truth = log_likelihood(stats, 0, 25);
    CHECK(at_truth > log_likelihood(stats, 0, 2500));
    CHECK(at_truth > log_likelihood(stats, 20, 25));
  }
  SUBCASE("additivity and oracle agreement") {
    const Priors flat{0, 1e8, 1e-3, 1e-3};
    for (double mu : {-1.0, 0.0, 0.4}) {
      for (double s2 : {16.0, 25.0, 36.0}) {
        const auto t = likelihood_terms(stats, mu, s2);
        CHECK(log_likelihood(stats, mu, s2) == t.adjusted_mean + t.minimum + t.maximum);
        CHECK(t.minimum == log_min_density(stats.min, 500, mu, s2));
        CHECK(t.maximum == log_max_density(stats.max, 500, mu, s2));
        const double via_oracle = oracle_log_joint(stats, flat, mu, s2) - log_prior(flat, mu, s2);
        CHECK(log_likelihood(stats, mu, s2) == doctest::Approx(via_oracle).epsilon(1e-9));
      }
    }
  }
  SUBCASE("n = 3 edge is finite") {
    const SummaryStats s{3, 2, 1, 3.5};
    CHECK(std::isfinite(log_likelihood(s, 2, 1)));
    const auto t = likelihood_terms(s, 2, 1);
    const TruncatedNormalParams tn{2, 1, 1, 3.5};
    CHECK(t.adjusted_mean == doctest::Approx(truncated_normal_logpdf(1.5, tn)).epsilon(1e-14));
  }
  SUBCASE("infeasible adjusted mean is -inf, not an exception") {
    CHECK(log_likelihood({4, 3.4, 0, 4}, 0, 1) == -kInf);
  }
}

TEST_CASE("log posterior") {
  const auto stats = synthetic(21, 60, 1.0, 2.0);
  SUBCASE("flat priors leave likelihood contrasts") {
    const Priors flat{0, 1e8, 1e-3, 1e-3};
    const double ref_post = log_posterior(stats, flat, 1.0, std::log(4.0));
    const double ref_lik = log_likelihood(stats, 1.0, 4.0);
    for (double mu : {0.6, 1.0, 1.3}) {
      for (double s2 : {3.0, 4.0, 5.5}) {
        const double dp = log_posterior(stats, flat, mu, std::log(s2)) - ref_post;
        const double dl = log_likelihood(stats, mu, s2) - ref_lik;
        CHECK(std::fabs(dp - dl) <= 1e-3);
      }
    }
  }
  SUBCASE("Jacobian: equal mass in sigma^2 and log sigma^2 coordinates") {
    const Priors priors;
    const double peak = log_posterior(stats, priors, stats.mean, std::log(4.0));
    auto in_log = [&](double mu, double l) { return std::exp(log_posterior(stats, priors, mu, l) - peak); };
    auto in_var = [&](double mu, double v) {
      return std::exp(log_likelihood(stats, mu, v) + log_prior(priors, mu, v) - peak);
    };
    const double mlo = stats.mean - 3, mhi = stats.mean + 3;
    const double mass_log = oracle::integrate(
        [&](double l) { return oracle::integrate([&](double m) { return in_log(m, l); }, mlo, mhi, 4, 1e-11); },
        std::log(0.3), std::log(40.0), 8, 1e-10);
    const double mass_var = oracle::integrate(
        [&](double v) { return oracle::integrate([&](double m) { return in_var(m, v); }, mlo, mhi, 4, 1e-11); },
        0.3, 40.0, 16, 1e-10);
    CHECK(mass_log == doctest::Approx(mass_var).epsilon(1e-4));
  }
  SUBCASE("mu argmax at fixed sigma^2 matches an independent grid") {
    const Priors priors{0.5, 4, 2, 2};
    const double s2 = 4.0;
    double best_lib = -kInf, best_orc = -kInf, arg_lib = 0, arg_orc = 0;
    for (double mu = -1; mu <= 3; mu += 0.005) {
      const double a = log_posterior(stats, priors, mu, std::log(s2));
      const double b = oracle_log_joint(stats, priors, mu, s2);
      if (a > best_lib) best_lib = a, arg_lib = mu;
      if (b > best_orc) best_orc = b, arg_orc = mu;
    }
    CHECK(arg_lib == arg_orc);
  }
}

TEST_CASE("Metropolis kernel") {
  SUBCASE("accept rule") {
    RngState rng(1);
    CHECK(metropolis_accept(rng, 0.0));
    CHECK(metropolis_accept(rng, 3.0));
    CHECK_FALSE(metropolis_accept(rng, -kInf));
    CHECK_FALSE(metropolis_accept(rng, std::nan("")));
    int acc = 0;
    for (int i = 0; i < 100000; ++i) acc += metropolis_accept(rng, std::log(0.3));
    CHECK(acc / 1e5 == doctest::Approx(0.3).epsilon(0.02));
  }
  SUBCASE("two-state detailed balance") {
    // Target (0.25, 0.75); the proposal always flips the state.
    RngState rng(2);
    const double log_pi[2] = {std::log(0.25), std::log(0.75)};
    int state = 0;
    long ones = 0;
    const long steps = 1000000;
    for (long i = 0; i < steps; ++i) {
      const int next = 1 - state;
      if (metropolis_accept(rng, log_pi[next] - log_pi[state])) state = next;
      ones += state;
    }
    CHECK(static_cast<double>(ones) / steps == doctest::Approx(0.75).epsilon(0.01));
  }
  SUBCASE("known standard-normal target") {
    RngState rng(3);
    RandomWalkOptions opt;
    opt.scales = {2.4, 2.4};
    opt.iterations = 100000;
    opt.pilot_iterations = 500;
    const auto r = random_walk_metropolis(
        [](double x, double y) { return -0.5 * (x * x + y * y); }, {0, 0}, opt, rng);
    REQUIRE(r.states.size() == 100000);
    for (int k = 0; k < 2; ++k) {
      std::vector<double> xs;
      for (const auto& s : r.states) xs.push_back(s[k]);
      CHECK(oracle::moments(xs).variance == doctest::Approx(1.0).epsilon(0.05));
    }
  }
  SUBCASE("pilot rescale moves acceptance toward the band") {
    RngState rng(4);
    RandomWalkOptions opt;
    opt.scales = {30, 30};
    opt.iterations = 20000;
    opt.pilot_iterations = 500;
    const auto r = random_walk_metropolis(
        [](double x, double y) { return -0.5 * (x * x + y * y); }, {0, 0}, opt, rng);
    CHECK(r.pilot_acceptance < 0.2);
    CHECK(r.final_scales[0] < 30);
    const double rate = std::count(r.accepted.begin(), r.accepted.end(), true) / 20000.0;
    CHECK(rate > r.pilot_acceptance);
  }
}

TEST_CASE("run_metropolis") {
  SamplerConfig config;
  config.method = Method::metropolis;
  config.seed = 5;
  const auto stats = synthetic(500, 500, 0.0, 5.0);
  SUBCASE("shape, acceptance and determinism") {
    const auto a = run_metropolis(stats, {}, config);
    const auto b = run_metropolis(stats, {}, config);
    REQUIRE(a.draws.size() == 10000);
    REQUIRE(a.acceptance_rate.has_value());
    CHECK(*a.acceptance_rate > 0.1);
    CHECK(*a.acceptance_rate < 0.7);
    CHECK(a.warnings.empty());
    bool same = true;
    for (std::size_t i = 0; i < a.draws.size(); ++i) {
      same = same && a.draws[i].mu == b.draws[i].mu && a.draws[i].sigma_sq == b.draws[i].sigma_sq;
      CHECK(a.draws[i].sigma_sq > 0);
    }
    CHECK(same);
  }
  SUBCASE("agrees with Gibbs on n = 500") {
    const auto m = summarize(run_metropolis(stats, {}, config));
    SamplerConfig gc;
    gc.seed = 5;
    const auto g = summarize(run_gibbs(stats, {}, gc));
    CHECK(std::fabs(m.mu.post_mean - g.mu.post_mean) <= 3 * std::max(m.mu.post_sd, g.mu.post_sd));
    CHECK(std::fabs(m.sigma.post_mean - g.sigma.post_mean) <=
          3 * std::max(m.sigma.post_sd, g.sigma.post_sd));
  }
  SUBCASE("extreme acceptance raises a warning") {
    auto c = config;
    c.mh_step_scale = 1e6;
    c.mh_pilot_iterations = 0;
    const auto chain = run_metropolis(stats, {}, c);
    CHECK_FALSE(chain.warnings.empty());
  }
  SUBCASE("wrong method") {
    SamplerConfig gc;
    CHECK_THROWS_AS(run_metropolis(stats, {}, gc), ValidationError);
  }
}

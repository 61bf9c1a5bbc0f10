// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Criterion 10 drives the built `sumnorm` executable.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sumnorm/augmentation.hpp"
#include "sumnorm/distributions.hpp"
#include "sumnorm/gibbs.hpp"
#include "sumnorm/reference.hpp"
#include "sumnorm/simulation.hpp"

using namespace sumnorm;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kRegressionSeed = 2024;

int failures = 0;

void verdict(int id, const std::string& title, bool pass, const std::string& detail) {
  std::printf("%s  [%d] %s | %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Augmentation grid shared by criteria 5 and 6: (stats, sigma^2), bounds
// asymmetric about the adjusted mean except where noted.
struct GridCase {
  SummaryStats stats;
  double sigma_sq;
};

const std::vector<GridCase> kGrid{
    {{3, 2.2, 1, 3}, 2.0},          {{5, 3, 1, 6}, 0.5},
    {{5, 3, 1, 6}, 9.0},            {{10, 0.5, -2, 6}, 0.04},
    {{10, 0.5, -2, 6}, 4.0},        {{12, -4, -10, -1}, 2.0},
    {{30, -1, -9, 3}, 25.0},        {{30, -1, -9, 3}, 400.0},
    {{50, 0, -1, 10}, 9.0},         {{200, 10.2, 3, 30}, 1.0},
    {{200, 10.2, 3, 30}, 16.0},     {{1000, 0.3, -16, 14}, 25.0},
};

// ---------------------------------------------------------------------------
// 1-3: the default study on the regression seed
// ---------------------------------------------------------------------------

void study_criteria() {
  Scenario s;
  s.base_seed = kRegressionSeed;
  const auto start = std::chrono::steady_clock::now();
  const auto results = run_replicates(s);
  const double minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  const auto rows = aggregate(results, s);

  std::size_t failed = 0;
  for (const auto& r : results) failed += r.ok ? 0 : 1;

  std::vector<double> sizes(s.sizes.begin(), s.sizes.end());
  auto gibbs_rmse = [&](Param p) {
    std::vector<double> out;
    for (auto n : s.sizes) {
      for (const auto& r : rows) {
        if (r.size == n && r.method == Method::gibbs && r.param == p) out.push_back(r.rmse);
      }
    }
    return out;
  };
  const auto rmse_mu = gibbs_rmse(Param::mu), rmse_sigma = gibbs_rmse(Param::sigma);
  const double rho_mu = spearman(sizes, rmse_mu), rho_sigma = spearman(sizes, rmse_sigma);
  std::ostringstream d1;
  d1 << results.size() << " cells (" << failed << " failed) in " << fmt("%.2f", minutes)
     << " min; Spearman(n, RMSE) mu " << fmt("%.3f", rho_mu) << ", sigma "
     << fmt("%.3f", rho_sigma) << " (need <= -0.8, < 15 min)";
  verdict(1, "default study trend", results.size() == 200 && failed == 0 && minutes < 15.0 &&
                                        rho_mu <= -0.8 && rho_sigma <= -0.8,
          d1.str());

  const auto cmp = compare_methods(rows);
  double worst = 0.0;
  bool ok2 = true;
  std::ostringstream d2;
  for (const auto& c : cmp) {
    if (c.size < kAgreementMinSize) continue;
    worst = std::max(worst, c.relative_difference);
    ok2 = ok2 && c.relative_difference <= 0.30;
  }
  d2 << "max relative RMSE difference for n >= 100: " << fmt("%.4f", worst) << " (need <= 0.30)";
  verdict(2, "Gibbs vs Metropolis RMSE agreement", ok2 && !cmp.empty(), d2.str());

  const double bound = 2.0 * s.true_sigma / std::sqrt(1000.0);
  const double rmse_1000 = rmse_mu.back();
  verdict(3, "mu efficiency at n = 1000", rmse_1000 <= bound,
          "Gibbs RMSE(mu) " + fmt("%.4f", rmse_1000) + " <= " + fmt("%.4f", bound));
}

// ---------------------------------------------------------------------------
// 4: coverage
// ---------------------------------------------------------------------------

void coverage_criterion() {
  Scenario s;
  s.sizes = {100};
  s.replicates = 50;
  s.methods = {Method::gibbs};
  s.base_seed = kRegressionSeed;
  const auto results = run_replicates(s);
  const double cov = coverage(results, Param::mu, 0.0);
  verdict(4, "95% interval coverage for mu, n = 100, 50 replicates", cov >= 0.80,
          "coverage " + fmt("%.2f", cov) + " (need >= 0.80)");
}

// ---------------------------------------------------------------------------
// 5-6: augmentation
// ---------------------------------------------------------------------------

void augmentation_criteria() {
  double worst_z = 0.0;
  bool ok = true;
  std::uint64_t seed = 500;
  for (const auto& g : kGrid) {
    RngState rng(seed++);
    const auto ctx = AugmentationContext::from(g.stats);
    std::vector<double> x;
    std::vector<double> means(10000);
    for (auto& m : means) {
      augment_into(rng, ctx, g.sigma_sq, MuTruncMode::root, x);
      m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    }
    const auto mom = oracle::moments(means);
    const double z = oracle::z_score(mom.mean, g.stats.mean, std::sqrt(mom.variance), means.size());
    worst_z = std::max(worst_z, z);
    ok = ok && z < 3.0;
  }
  verdict(5, "augmented-mean calibration", ok && kGrid.size() >= 9,
          std::to_string(kGrid.size()) + " configurations x 1e4 augmentations; worst |z| " +
              fmt("%.2f", worst_z) + " (need < 3)");

  double worst_residual = 0.0, worst_oracle = 0.0;
  worst_z = 0.0;
  ok = true;
  for (const auto& g : kGrid) {
    const auto [a, b] = centered_bounds(g.stats);
    const double m = solve_mu_trunc(g.sigma_sq, a, b);
    const TruncatedNormalParams p{m, g.sigma_sq, a, b};
    const double residual = std::fabs(truncated_normal_mean(p));
    const double oracle_residual = std::fabs(oracle::truncated_mean(m, g.sigma_sq, a, b));
    RngState rng(seed++);
    TruncatedNormalSampler sampler(p);
    std::vector<double> xs(1000000);
    for (auto& v : xs) v = sampler(rng);
    const auto mom = oracle::moments(xs);
    const double z = oracle::z_score(mom.mean, 0.0, std::sqrt(mom.variance), xs.size());
    worst_residual = std::max(worst_residual, residual);
    worst_oracle = std::max(worst_oracle, oracle_residual);
    worst_z = std::max(worst_z, z);
    ok = ok && residual <= 1e-9 && oracle_residual <= 1e-9 && z < 3.0;
  }
  verdict(6, "truncation location solves E[Z] = 0", ok,
          "worst |mean| " + fmt("%.2e", worst_residual) + " (50-digit check " +
              fmt("%.2e", worst_oracle) + ", need <= 1e-9); worst Monte Carlo |z| " +
              fmt("%.2f", worst_z) + " on 1e6 draws (need < 3)");
}

// ---------------------------------------------------------------------------
// 7: sampler distributions
// ---------------------------------------------------------------------------

void sampler_criterion() {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  struct Case {
    TruncatedNormalParams p;
    TruncationRegime regime;
  };
  const Case cases[] = {
      {{0, 1, -0.5, 0.5}, TruncationRegime::naive},
      {{1, 4, -kInf, 2}, TruncationRegime::naive},
      {{0, 1, 5, 6}, TruncationRegime::exponential},
      {{2, 0.25, -kInf, -2}, TruncationRegime::exponential},
      {{0, 1, 5, 5.1}, TruncationRegime::uniform},
      {{0, 1, -0.001, 0.002}, TruncationRegime::uniform},
  };
  bool ok = true;
  std::ostringstream d;
  d << "KS D/critical:";
  std::uint64_t seed = 700;
  const std::size_t n = 100000;
  for (const auto& c : cases) {
    TruncatedNormalSampler sampler(c.p);
    RngState rng(seed++);
    std::vector<double> xs(n);
    for (auto& x : xs) x = sampler(rng);
    const double ratio = oracle::ks_statistic(xs, [&](double x) {
      return oracle::truncated_cdf(x, c.p.mu, c.p.sigma_sq, c.p.a, c.p.b);
    }) / oracle::ks_critical(n);
    ok = ok && sampler.regime() == c.regime && ratio < 1.0;
    d << ' ' << to_string(sampler.regime()) << '=' << fmt("%.2f", ratio);
  }

  struct Moment {
    const char* name;
    bool inverse;
    double shape, second, mean, sd;
  };
  const Moment moments[] = {
      {"gamma(1,3)", false, 1, 3, 1.0 / 3, 1.0 / 3},
      {"gamma(5,2)", false, 5, 2, 2.5, std::sqrt(1.25)},
      {"gamma(0.5,1)", false, 0.5, 1, 0.5, std::sqrt(0.5)},
      {"invgamma(3,4)", true, 3, 4, 2.0, 2.0},
      {"invgamma(10,18)", true, 10, 18, 2.0, 2.0 / std::sqrt(8.0)},
  };
  d << "; moment |z|:";
  for (const auto& m : moments) {
    RngState rng(seed++);
    std::vector<double> xs(1000000);
    for (auto& x : xs) {
      x = m.inverse ? sample_inverse_gamma(rng, m.shape, m.second)
                    : sample_gamma(rng, m.shape, m.second);
    }
    const double z = oracle::z_score(oracle::moments(xs).mean, m.mean, m.sd, xs.size());
    ok = ok && z < 3.0;
    d << ' ' << m.name << '=' << fmt("%.2f", z);
  }
  verdict(7, "sampler distributions (KS 1%, moments 3 SE)", ok, d.str());
}

// ---------------------------------------------------------------------------
// 8: conditional posteriors
// ---------------------------------------------------------------------------

void conditional_criterion() {
  const Priors priors{1.0, 4.0, 2.5, 2.0};
  const SummaryStats stats{20, 0.7, -3, 4};
  const double sigma_sq = 2.0;
  const std::size_t n = 100000;

  const double prec = 1 / priors.tau0_sq + stats.n / sigma_sq;
  const double mean = (priors.mu0 / priors.tau0_sq + stats.n * stats.mean / sigma_sq) / prec;
  RngState r1(801);
  std::vector<double> mu(n);
  for (auto& v : mu) v = sample_mu_conditional(r1, sigma_sq, stats, priors);
  const double d_mu =
      oracle::ks_statistic(mu, [&](double v) { return oracle::normal_cdf(v, mean, 1 / prec); });

  const std::vector<double> x_star{-3, -1.2, 0.4, 0.9, 2.2, 1.7, -0.3, 4};
  const double mu_fixed = 0.5;
  double ss = 0;
  for (double x : x_star) ss += (x - mu_fixed) * (x - mu_fixed);
  const double shape = priors.alpha0 + x_star.size() / 2.0, scale = priors.beta0 + ss / 2;
  RngState r2(802);
  std::vector<double> s2(n);
  for (auto& v : s2) v = sample_sigma_sq_conditional(r2, mu_fixed, x_star, priors);
  const double d_s2 =
      oracle::ks_statistic(s2, [&](double v) { return oracle::inverse_gamma_cdf(v, shape, scale); });

  const double crit = oracle::ks_critical(n);
  verdict(8, "conditional posterior draws (KS 1%, 1e5 draws)", d_mu < crit && d_s2 < crit,
          "mu D " + fmt("%.5f", d_mu) + ", sigma^2 D " + fmt("%.5f", d_s2) + ", critical " +
              fmt("%.5f", crit));
}

// ---------------------------------------------------------------------------
// 9: order-statistic densities
// ---------------------------------------------------------------------------

void order_statistic_criterion() {
  bool ok = true;
  double worst = 0.0;
  for (std::int64_t n : {2, 10, 100, 1000}) {
    for (bool is_min : {true, false}) {
      auto f = [&](double x) {
        return std::exp(is_min ? log_min_density(x, n, 0.0, 1.0) : log_max_density(x, n, 0.0, 1.0));
      };
      const double err = std::fabs(oracle::integrate(f, -12, 12, 48) - 1.0);
      worst = std::max(worst, err);
      ok = ok && err <= 1e-6;
    }
  }

  const std::size_t reps = 1000000;
  const double sigma_sq = 25.0, lo = -25.0, width = 0.25;
  const int bins = 120;
  RngState rng(901);
  std::vector<double> observed(bins + 2, 0.0), expected(bins + 2, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 10; ++i) m = std::min(m, 5.0 * sample_standard_normal(rng));
    const double k = std::floor((m - lo) / width);
    observed[k < 0 ? 0 : (k >= bins ? bins + 1 : static_cast<std::size_t>(k) + 1)] += 1;
  }
  auto f = [&](double x) { return std::exp(log_min_density(x, 10, 0.0, sigma_sq)); };
  expected[0] = oracle::integrate(f, -80, lo, 16) * reps;
  for (int k = 0; k < bins; ++k) {
    expected[k + 1] = oracle::integrate(f, lo + k * width, lo + (k + 1) * width) * reps;
  }
  expected[bins + 1] = oracle::integrate(f, lo + bins * width, 60, 16) * reps;
  const auto chi = oracle::chi_square(observed, expected);
  ok = ok && chi.p_value > 0.01;
  verdict(9, "order-statistic densities", ok,
          "worst |integral - 1| " + fmt("%.2e", worst) + " (need <= 1e-6); n=10 minimum chi^2 " +
              fmt("%.1f", chi.statistic) + " on " + std::to_string(chi.dof) + " dof, p " +
              fmt("%.3f", chi.p_value) + " (need > 0.01)");
}

// ---------------------------------------------------------------------------
// 10: CLI determinism
// ---------------------------------------------------------------------------

std::string capture(const std::string& command, int& status) {
  std::string out;
  FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  status = pclose(pipe);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void determinism_criterion() {
  const std::string exe = SUMNORM_EXE;
  const fs::path root = fs::temp_directory_path() / "sumnorm-acceptance";
  fs::remove_all(root);
  const std::string estimate = " estimate --n 100 --mean 0.1 --min -13.2 --max 12.8 --seed 7";
  const std::string study = " --sizes 10,50 --replicates 3 --iters 2000 --burnin 1000 --seed 11";
  struct Invocation {
    std::string args;
    bool writes_files;
  };
  const std::vector<Invocation> invocations{
      {estimate, false},
      {estimate + " --method metropolis --format csv", false},
      {estimate + " --mu-trunc one-shot --thin 3", false},
      {" simulate" + study + " --plots", true},
      {" simulate" + study + " --methods gibbs --format json", true},
      {" compare" + study + " --format json", true},
  };
  bool ok = true;
  int checked = 0;
  for (std::size_t i = 0; i < invocations.size(); ++i) {
    const auto& inv = invocations[i];
    std::array<std::string, 2> outs;
    std::array<fs::path, 2> dirs;
    for (int run = 0; run < 2; ++run) {
      dirs[run] = root / ("inv" + std::to_string(i) + "-" + std::to_string(run));
      std::string cmd = "'" + exe + "'" + inv.args;
      // Worker count must not matter either.
      if (inv.writes_files) {
        cmd += " --out-dir '" + dirs[run].string() + "' --workers " + (run ? "3" : "1");
      }
      int status = 0;
      outs[run] = capture(cmd, status);
      ok = ok && status == 0 && !outs[run].empty();
    }
    ok = ok && outs[0] == outs[1];
    ++checked;
    if (inv.writes_files) {
      for (const auto& entry : fs::directory_iterator(dirs[0])) {
        const auto other = dirs[1] / entry.path().filename();
        ok = ok && fs::exists(other) && slurp(entry.path()) == slurp(other);
        ++checked;
      }
    }
  }
  verdict(10, "CLI byte-reproducibility with explicit seed", ok,
          std::to_string(invocations.size()) + " invocations run twice, " +
              std::to_string(checked) + " outputs compared byte for byte");
}

}  // namespace

int main() {
  study_criteria();
  coverage_criterion();
  augmentation_criteria();
  sampler_criterion();
  conditional_criterion();
  order_statistic_criterion();
  determinism_criterion();
  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

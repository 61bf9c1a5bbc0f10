#include "sumnorm/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "sumnorm/distributions.hpp"
#include "sumnorm/errors.hpp"
#include "sumnorm/gibbs.hpp"
#include "sumnorm/reference.hpp"

namespace sumnorm {

void require_valid(const Scenario& s) {
  if (!std::isfinite(s.true_mu)) throw ValidationError("scenario: true_mu must be finite");
  if (!(s.true_sigma > 0.0) || !std::isfinite(s.true_sigma)) {
    throw ValidationError("scenario: true_sigma must be positive");
  }
  if (s.sizes.empty()) throw ValidationError("scenario: at least one size is required");
  for (auto n : s.sizes) {
    if (n < 3) throw ValidationError("scenario: every size must be at least 3");
  }
  if (s.replicates < 1) throw ValidationError("scenario: replicates must be at least 1");
  if (s.methods.empty()) throw ValidationError("scenario: at least one method is required");
  require_valid(s.priors);
  require_valid(s.sampler);
}

std::string_view to_string(Param param) { return param == Param::mu ? "mu" : "sigma"; }

std::vector<double> generate_dataset(RngState& rng, std::int64_t n, double mu, double sigma) {
  if (n < 3) throw ValidationError("generate_dataset: n must be at least 3");
  if (!(sigma > 0.0)) throw ValidationError("generate_dataset: sigma must be positive");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& x : out) x = mu + sigma * sample_standard_normal(rng);
  return out;
}

SummaryStats summarize_dataset(std::span<const double> samples) {
  if (samples.size() < 3) {
    throw ValidationError("summarize_dataset: at least 3 samples are required");
  }
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
                      static_cast<double>(samples.size());
  // The mean of rounded data can land a hair outside [min, max].
  return {static_cast<std::int64_t>(samples.size()), std::clamp(mean, *lo, *hi), *lo, *hi};
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::int64_t size, std::int64_t replicate) {
  return hash_seed(base_seed, size, replicate);
}

std::uint64_t sampler_seed(std::uint64_t cell, Method method) {
  return hash_seed(cell, method == Method::gibbs ? 1 : 2);
}

ReplicateResult run_replicate(const Scenario& scenario, std::int64_t size,
                              std::int64_t replicate, Method method) {
  ReplicateResult r;
  r.size = size;
  r.replicate = replicate;
  r.method = method;
  r.seed = cell_seed(scenario.base_seed, size, replicate);
  const auto start = std::chrono::steady_clock::now();
  try {
    RngState data_rng(r.seed);
    const auto data = generate_dataset(data_rng, size, scenario.true_mu, scenario.true_sigma);
    const auto stats = summarize_dataset(data);
    SamplerConfig config = scenario.sampler;
    config.method = method;
    config.seed = sampler_seed(r.seed, method);
    const Chain chain = method == Method::gibbs ? run_gibbs(stats, scenario.priors, config)
                                                : run_metropolis(stats, scenario.priors, config);
    r.summary = summarize(chain);
    r.acceptance_rate = chain.acceptance_rate;
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  if (scenario.record_timing) {
    r.wall_time_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  }
  return r;
}

std::vector<ReplicateResult> run_replicates(const Scenario& scenario) {
  require_valid(scenario);
  struct Cell {
    std::int64_t size, replicate;
    Method method;
  };
  std::vector<Cell> cells;
  for (auto size : scenario.sizes) {
    for (std::int64_t rep = 0; rep < scenario.replicates; ++rep) {
      for (auto method : scenario.methods) cells.push_back({size, rep, method});
    }
  }
  std::vector<ReplicateResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      results[i] = run_replicate(scenario, cells[i].size, cells[i].replicate, cells[i].method);
    }
  };
  unsigned workers = scenario.workers ? scenario.workers : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(cells.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return results;
}

double rmse(std::span<const double> estimates, double truth) {
  if (estimates.empty()) throw std::invalid_argument("rmse: no estimates");
  double ss = 0.0;
  for (double e : estimates) ss += (e - truth) * (e - truth);
  return std::sqrt(ss / static_cast<double>(estimates.size()));
}

double coverage(std::span<const Interval> intervals, double truth) {
  if (intervals.empty()) throw std::invalid_argument("coverage: no intervals");
  const auto hits = std::count_if(intervals.begin(), intervals.end(), [truth](const Interval& i) {
    return i.lower <= truth && truth <= i.upper;
  });
  return static_cast<double>(hits) / static_cast<double>(intervals.size());
}

double coverage(std::span<const ReplicateResult> results, Param param, double truth) {
  std::vector<Interval> intervals;
  for (const auto& r : results) {
    if (r.ok) intervals.push_back({r.param(param).ci_lower, r.param(param).ci_upper});
  }
  return coverage(intervals, truth);
}

std::vector<AggregateRow> aggregate(std::span<const ReplicateResult> results,
                                    const Scenario& scenario) {
  std::vector<AggregateRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto size : scenario.sizes) {
    for (auto method : scenario.methods) {
      for (Param param : {Param::mu, Param::sigma}) {
        const double truth = param == Param::mu ? scenario.true_mu : scenario.true_sigma;
        std::vector<double> estimates;
        std::vector<Interval> intervals;
        std::int64_t failed = 0;
        for (const auto& r : results) {
          if (r.size != size || r.method != method) continue;
          if (!r.ok) {
            ++failed;
            continue;
          }
          estimates.push_back(r.param(param).post_mean);
          intervals.push_back({r.param(param).ci_lower, r.param(param).ci_upper});
        }
        AggregateRow row{size, method, param, nan, nan,
                         static_cast<std::int64_t>(estimates.size()), failed};
        if (!estimates.empty()) {
          row.rmse = rmse(estimates, truth);
          row.coverage = coverage(intervals, truth);
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<ComparisonRow> compare_methods(std::span<const AggregateRow> rows, double threshold,
                                           std::int64_t flag_min_size) {
  std::vector<ComparisonRow> out;
  for (const auto& g : rows) {
    if (g.method != Method::gibbs) continue;
    const auto m = std::find_if(rows.begin(), rows.end(), [&](const AggregateRow& r) {
      return r.method == Method::metropolis && r.size == g.size && r.param == g.param;
    });
    if (m == rows.end()) continue;
    ComparisonRow c{g.size, g.param, g.rmse, m->rmse, 0.0, false};
    const double diff = std::fabs(g.rmse - m->rmse);
    c.relative_difference = diff == 0.0 ? 0.0 : diff / m->rmse;
    c.flagged = g.size >= flag_min_size && !(c.relative_difference <= threshold);
    out.push_back(c);
  }
  return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("spearman: need two equally sized samples of length >= 2");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace sumnorm

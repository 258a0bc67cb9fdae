#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include "chebci/chains.hpp"
#include "chebci/core.hpp"
#include "chebci/detail/parallel.hpp"
#include "chebci/errors.hpp"
#include "chebci/rng.hpp"
#include "chebci/variance.hpp"

namespace chebci {

struct ReplicationRow {
  std::size_t replication = 0;
  double estimate = 0.0;
  double v_hat = 0.0;
  double cheby_lower = 0.0;
  double cheby_upper = 0.0;
  bool cheby_covered = false;
  double clt_lower = 0.0;
  double clt_upper = 0.0;
  bool clt_covered = false;
};

struct MethodCoverage {
  std::size_t covered = 0;
  double coverage = 0.0;        // covered / R
  double std_error = 0.0;       // sqrt(p (1 - p) / R)
  double mean_half_width = 0.0;
};

struct CoverageResult {
  ChainSpec chain;
  CiConfig config;
  std::size_t n = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  double multiplier_ratio = 0.0; // chebyshev / clt multiplier
  MethodCoverage chebyshev;
  MethodCoverage clt;
  // Fewer than 100 replications: coverage standard errors are not meaningful.
  bool low_replication = false;
  std::vector<ReplicationRow> rows; // indexed by replication
};

namespace detail {

inline MethodCoverage summarize(std::size_t covered, double width_sum, std::size_t reps) {
  MethodCoverage m;
  m.covered = covered;
  m.coverage = static_cast<double>(covered) / static_cast<double>(reps);
  m.std_error = std::sqrt(m.coverage * (1.0 - m.coverage) / static_cast<double>(reps));
  m.mean_half_width = width_sum / static_cast<double>(reps);
  return m;
}

} // namespace detail

// Simulates `replications` independent traces (replication r uses
// derive_stream(seed, r)), builds the Chebyshev and CLT intervals from one
// shared variance estimate per trace, and counts how often each strictly
// contains the chain's true mean. Output does not depend on `threads`.
inline CoverageResult run_coverage(const ChainSpec& chain, std::size_t n, std::size_t replications,
                                   const CiConfig& config, std::uint64_t seed,
                                   std::size_t threads = 0) {
  chain.validate();
  config.validate();
  if (replications == 0) throw std::invalid_argument("run_coverage: replications must be positive");
  if (n == 0) throw std::invalid_argument("run_coverage: n must be positive");
  if (config.burn_in >= n)
    throw insufficient_samples("insufficient samples: burn-in " + std::to_string(config.burn_in) +
                               " >= n = " + std::to_string(n));
  if (config.variance_method != VarianceMethod::batch_means &&
      config.variance_method != VarianceMethod::initial_sequence)
    throw std::invalid_argument("run_coverage: variance method must be batch_means or initial_sequence");

  const double truth = chain.true_mean();
  CoverageResult result;
  result.chain = chain;
  result.config = config;
  result.n = n;
  result.replications = replications;
  result.seed = seed;
  result.low_replication = replications < 100;
  result.rows.resize(replications);

  std::vector<double> cheby_widths(replications);
  std::vector<double> clt_widths(replications);

  detail::parallel_for(replications, threads, [&](std::size_t r) {
    try {
      RngStream rng = derive_stream(seed, r);
      const AnalysisReport a = analyze(simulate(chain, n, rng), config);
      ReplicationRow& row = result.rows[r];
      row.replication = r;
      row.estimate = a.chebyshev.estimate;
      row.v_hat = a.variance.v_hat;
      row.cheby_lower = a.chebyshev.lower;
      row.cheby_upper = a.chebyshev.upper;
      row.cheby_covered = a.chebyshev.contains(truth);
      row.clt_lower = a.clt.lower;
      row.clt_upper = a.clt.upper;
      row.clt_covered = a.clt.contains(truth);
      cheby_widths[r] = a.chebyshev.half_width;
      clt_widths[r] = a.clt.half_width;
    } catch (const std::exception& e) {
      throw replication_error(r, e.what());
    }
  });

  std::size_t cheby_covered = 0;
  std::size_t clt_covered = 0;
  for (const auto& row : result.rows) {
    cheby_covered += row.cheby_covered;
    clt_covered += row.clt_covered;
  }
  result.chebyshev =
      detail::summarize(cheby_covered, detail::compensated_sum(cheby_widths), replications);
  result.clt = detail::summarize(clt_covered, detail::compensated_sum(clt_widths), replications);
  result.multiplier_ratio =
      chebyshev_multiplier(config.alpha, config.epsilon) / clt_multiplier(config.alpha);
  return result;
}

// a_n = sqrt(V / (n alpha)), the deviation at which Chebyshev's inequality
// gives probability at most alpha when Var(e_n) = V/n.
inline double chebyshev_threshold(double v, std::size_t n, double alpha) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("chebyshev_threshold: V must be > 0");
  if (n == 0) throw std::domain_error("chebyshev_threshold: n must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("chebyshev_threshold: alpha must lie in (0, 1)");
  return std::sqrt(v / (static_cast<double>(n) * alpha));
}

// Fraction of R iid replications with |e_n - mu| >= a_n, where a_n uses the
// true V = sigma^2. For iid chains Chebyshev's inequality bounds this by
// alpha at every n. sigma = 0 is accepted as the constant chain, which
// never deviates.
inline double finite_sample_bound_check(const ChainSpec& chain, std::size_t n, std::size_t replications,
                                        double alpha, std::uint64_t seed, std::size_t threads = 0) {
  if (chain.kind != ChainKind::iid_normal)
    throw std::invalid_argument("finite_sample_bound_check: only iid chains have an exact finite-n bound");
  if (replications == 0) throw std::invalid_argument("finite_sample_bound_check: replications must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("finite_sample_bound_check: alpha must lie in (0, 1)");
  if (n == 0) throw std::invalid_argument("finite_sample_bound_check: n must be positive");
  if (chain.sigma == 0.0 && std::isfinite(chain.mu)) return 0.0;
  chain.validate();

  const double a_n = chebyshev_threshold(*chain.true_v(), n, alpha);
  std::vector<unsigned char> exceeded(replications);
  detail::parallel_for(replications, threads, [&](std::size_t r) {
    RngStream rng = derive_stream(seed, r);
    const double e_n = mcmc_estimate(simulate(chain, n, rng));
    exceeded[r] = std::fabs(e_n - chain.mu) >= a_n;
  });
  std::size_t count = 0;
  for (auto e : exceeded) count += e;
  return static_cast<double>(count) / static_cast<double>(replications);
}

} // namespace chebci

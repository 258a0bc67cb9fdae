#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chebci/errors.hpp"
#include "chebci/trace.hpp"

namespace chebci {

enum class VarianceMethod { batch_means, initial_sequence, replicated_runs, external };

inline std::string_view to_string(VarianceMethod m) noexcept {
  switch (m) {
  case VarianceMethod::batch_means: return "batch_means";
  case VarianceMethod::initial_sequence: return "initial_sequence";
  case VarianceMethod::replicated_runs: return "replicated_runs";
  case VarianceMethod::external: return "external";
  }
  return "unknown";
}

inline std::optional<VarianceMethod> parse_variance_method(std::string_view s) noexcept {
  if (s == "batch_means") return VarianceMethod::batch_means;
  if (s == "initial_sequence") return VarianceMethod::initial_sequence;
  if (s == "replicated_runs") return VarianceMethod::replicated_runs;
  if (s == "external") return VarianceMethod::external;
  return std::nullopt;
}

struct BatchMeansDetail {
  std::size_t batch_size = 0;
  std::size_t batch_count = 0;
  std::size_t dropped = 0; // trailing samples not in any batch
};

struct InitialSequenceDetail {
  std::size_t pairs = 0;       // T: number of positive pair sums kept
  std::size_t lag_cap = 0;     // largest lag the search was allowed to use
  bool hit_cap = false;        // stopped at the cap rather than at a non-positive pair
};

struct ReplicatedRunsDetail {
  std::size_t runs = 0;
  std::size_t n_per_run = 0;
};

using VarianceDetail =
    std::variant<std::monostate, BatchMeansDetail, InitialSequenceDetail, ReplicatedRunsDetail>;

// Estimate of the asymptotic variance V = lim n Var(e_n). v_hat is never negative.
struct VarianceEstimate {
  double v_hat = 0.0;
  VarianceMethod method = VarianceMethod::external;
  std::size_t effective_n = 0;
  VarianceDetail detail;

  // For variance values obtained elsewhere.
  static VarianceEstimate external(double v_hat, std::size_t effective_n = 0) {
    if (!(v_hat >= 0.0) || !std::isfinite(v_hat))
      throw std::invalid_argument("variance estimate must be finite and >= 0");
    return {v_hat, VarianceMethod::external, effective_n, std::monostate{}};
  }
};

namespace detail {

// Biased (divisor n) autocovariance about a supplied mean.
inline double autocovariance_about(std::span<const double> xs, double mean, std::size_t lag) noexcept {
  const std::size_t n = xs.size();
  double sum = 0.0;
  for (std::size_t i = 0; i + lag < n; ++i) sum += (xs[i] - mean) * (xs[i + lag] - mean);
  return sum / static_cast<double>(n);
}

inline std::size_t isqrt(std::size_t n) noexcept {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

} // namespace detail

// gamma(k) = (1/n) sum_{i<n-k} (x_i - mean)(x_{i+k} - mean).
inline double autocovariance(const Trace& trace, std::size_t lag) {
  if (lag >= trace.size())
    throw std::domain_error("autocovariance: lag " + std::to_string(lag) +
                            " must be below trace length " + std::to_string(trace.size()));
  const auto xs = trace.values();
  return detail::autocovariance_about(xs, detail::mean(xs), lag);
}

// Non-overlapping batch means. Default batch size is floor(sqrt(n)); the
// trailing n - a*b samples are dropped so all batches have equal size.
inline VarianceEstimate batch_means(const Trace& trace,
                                    std::optional<std::size_t> batch_size = std::nullopt) {
  const std::size_t n = trace.size();
  if (n < 4)
    throw insufficient_samples("insufficient samples for batch means: n = " + std::to_string(n) +
                               " (need >= 4)");
  const std::size_t b = batch_size.value_or(detail::isqrt(n));
  if (b == 0) throw std::invalid_argument("batch_means: batch size must be positive");
  const std::size_t a = n / b;
  if (a < 2)
    throw insufficient_samples("insufficient samples for batch means: batch size " +
                               std::to_string(b) + " gives " + std::to_string(a) + " batch(es)");

  const auto xs = trace.values();
  std::vector<double> means(a);
  for (std::size_t k = 0; k < a; ++k) means[k] = detail::mean(xs.subspan(k * b, b));
  const double grand = detail::mean(means);

  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  const double v_hat = static_cast<double>(b) * ss / static_cast<double>(a - 1);

  return {v_hat, VarianceMethod::batch_means, a * b, BatchMeansDetail{b, a, n - a * b}};
}

// Window estimator truncated by the initial positive sequence rule:
// Gamma_t = gamma(2t) + gamma(2t+1) is summed for t = 0, 1, ... until the
// first non-positive Gamma_t, and v_hat = -gamma(0) + 2 sum Gamma_t.
// Lags are capped at floor(n/2), or at max_lag when that is smaller.
inline VarianceEstimate initial_sequence_variance(const Trace& trace,
                                                  std::optional<std::size_t> max_lag = std::nullopt) {
  const std::size_t n = trace.size();
  if (n < 4)
    throw insufficient_samples("insufficient samples for initial sequence estimator: n = " +
                               std::to_string(n) + " (need >= 4)");
  if (max_lag && *max_lag == 0)
    throw std::invalid_argument("initial_sequence_variance: max_lag must be positive");

  std::size_t cap = n / 2;
  if (max_lag) cap = std::min(cap, *max_lag);

  const auto xs = trace.values();
  const double mean = detail::mean(xs);
  const double gamma0 = detail::autocovariance_about(xs, mean, 0);

  double pair_sum = 0.0;
  std::size_t pairs = 0;
  bool hit_cap = true;
  for (std::size_t t = 0; 2 * t + 1 <= cap; ++t) {
    const double even = t == 0 ? gamma0 : detail::autocovariance_about(xs, mean, 2 * t);
    const double big_gamma = even + detail::autocovariance_about(xs, mean, 2 * t + 1);
    if (big_gamma <= 0.0) {
      hit_cap = false;
      break;
    }
    pair_sum += big_gamma;
    ++pairs;
  }

  const double v_hat = std::max(0.0, -gamma0 + 2.0 * pair_sum);
  return {v_hat, VarianceMethod::initial_sequence, n, InitialSequenceDetail{pairs, cap, hit_cap}};
}

// n_per_run times the sample variance (divisor R-1) of independent run means.
inline VarianceEstimate replicated_runs_variance(std::span<const double> run_means,
                                                 std::size_t n_per_run) {
  const std::size_t runs = run_means.size();
  if (runs < 2)
    throw insufficient_samples("insufficient samples for replicated runs: " +
                               std::to_string(runs) + " run(s) (need >= 2)");
  if (n_per_run == 0) throw std::invalid_argument("replicated_runs_variance: n_per_run must be positive");
  for (double m : run_means)
    if (!std::isfinite(m)) throw std::invalid_argument("replicated_runs_variance: non-finite run mean");

  const double grand = detail::mean(run_means);
  double ss = 0.0;
  for (double m : run_means) ss += (m - grand) * (m - grand);
  const double v_hat = static_cast<double>(n_per_run) * ss / static_cast<double>(runs - 1);
  return {v_hat, VarianceMethod::replicated_runs, runs * n_per_run,
          ReplicatedRunsDetail{runs, n_per_run}};
}

// Runs the per-trace estimator selected by method. Replicated runs and
// external estimates need more than one trace and are rejected here.
inline VarianceEstimate estimate_variance(const Trace& trace, VarianceMethod method,
                                          std::optional<std::size_t> tuning = std::nullopt) {
  switch (method) {
  case VarianceMethod::batch_means: return batch_means(trace, tuning);
  case VarianceMethod::initial_sequence: return initial_sequence_variance(trace, tuning);
  default:
    throw std::invalid_argument(std::string("variance method '") + std::string(to_string(method)) +
                                "' cannot be computed from a single trace");
  }
}

} // namespace chebci

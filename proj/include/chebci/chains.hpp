#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chebci/detail/parallel.hpp"
#include "chebci/rng.hpp"
#include "chebci/trace.hpp"
#include "chebci/variance.hpp"

namespace chebci {

enum class ChainKind { iid_normal, ar1, rwm_normal };

inline std::string_view to_string(ChainKind k) noexcept {
  switch (k) {
  case ChainKind::iid_normal: return "iid_normal";
  case ChainKind::ar1: return "ar1";
  case ChainKind::rwm_normal: return "rwm_normal";
  }
  return "unknown";
}

// A test chain with known stationary mean. h is the identity throughout.
//
//  iid_normal: X_i ~ N(mu, sigma^2).                      V = sigma^2.
//  ar1:        X_{i+1} = rho X_i + s Z_i.  mean 0,          V = s^2 / (1 - rho)^2.
//  rwm_normal: random-walk Metropolis on N(0, 1).  mean 0,  V unknown.
//
// x0 is the first trace value; when absent the chain starts from a draw of
// its stationary distribution.
struct ChainSpec {
  ChainKind kind = ChainKind::iid_normal;
  double mu = 0.0;
  double sigma = 1.0;
  double rho = 0.0;
  double s = 1.0;
  double proposal_sd = 2.4;
  std::optional<double> x0;

  static ChainSpec iid_normal(double mu, double sigma) {
    ChainSpec c;
    c.kind = ChainKind::iid_normal;
    c.mu = mu;
    c.sigma = sigma;
    return c;
  }

  static ChainSpec ar1(double rho, double s, std::optional<double> x0 = std::nullopt) {
    ChainSpec c;
    c.kind = ChainKind::ar1;
    c.rho = rho;
    c.s = s;
    c.x0 = x0;
    return c;
  }

  static ChainSpec rwm_normal(double proposal_sd, std::optional<double> x0 = std::nullopt) {
    ChainSpec c;
    c.kind = ChainKind::rwm_normal;
    c.proposal_sd = proposal_sd;
    c.x0 = x0;
    return c;
  }

  void validate() const {
    switch (kind) {
    case ChainKind::iid_normal:
      if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu))
        throw std::invalid_argument("iid_normal: sigma must be finite and > 0");
      break;
    case ChainKind::ar1:
      if (!(std::fabs(rho) < 1.0))
        throw std::invalid_argument("ar1: |rho| must be < 1 for stationarity, got rho = " +
                                    std::to_string(rho));
      if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("ar1: s must be finite and > 0");
      break;
    case ChainKind::rwm_normal:
      if (!(proposal_sd > 0.0) || !std::isfinite(proposal_sd))
        throw std::invalid_argument("rwm_normal: proposal_sd must be finite and > 0");
      break;
    }
    if (x0 && !std::isfinite(*x0)) throw std::invalid_argument("x0 must be finite");
  }

  double true_mean() const noexcept { return kind == ChainKind::iid_normal ? mu : 0.0; }

  std::optional<double> true_v() const noexcept {
    switch (kind) {
    case ChainKind::iid_normal: return sigma * sigma;
    case ChainKind::ar1: return s * s / ((1.0 - rho) * (1.0 - rho));
    case ChainKind::rwm_normal: return std::nullopt;
    }
    return std::nullopt;
  }

  bool stationary_start() const noexcept { return !x0.has_value(); }
};

struct RwmRun {
  Trace trace;
  double acceptance_rate;
};

namespace detail {

inline std::vector<double> simulate_iid_values(const ChainSpec& c, std::size_t n, RngStream& rng) {
  std::vector<double> xs(n);
  for (auto& x : xs) x = c.mu + c.sigma * rng.next_gaussian();
  return xs;
}

inline std::vector<double> simulate_ar1_values(const ChainSpec& c, std::size_t n, RngStream& rng) {
  std::vector<double> xs(n);
  double x = c.x0 ? *c.x0 : c.s / std::sqrt(1.0 - c.rho * c.rho) * rng.next_gaussian();
  xs[0] = x;
  for (std::size_t i = 1; i < n; ++i) {
    x = c.rho * x + c.s * rng.next_gaussian();
    xs[i] = x;
  }
  return xs;
}

// Each step draws one proposal increment and one uniform, accepted or not.
inline RwmRun simulate_rwm(const ChainSpec& c, std::size_t n, RngStream& rng) {
  std::vector<double> xs(n);
  double x = c.x0 ? *c.x0 : rng.next_gaussian();
  xs[0] = x;
  std::size_t accepted = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const double y = x + c.proposal_sd * rng.next_gaussian();
    const double u = 1.0 - rng.next_uniform(); // (0, 1]
    if (std::log(u) < 0.5 * (x * x - y * y)) {
      x = y;
      ++accepted;
    }
    xs[i] = x;
  }
  const double rate = n > 1 ? static_cast<double>(accepted) / static_cast<double>(n - 1) : 0.0;
  return {Trace(std::move(xs)), rate};
}

inline void check_length(std::size_t n) {
  if (n == 0) throw std::invalid_argument("simulation length n must be positive");
}

} // namespace detail

// Simulates n steps of the chain, drawing from the given stream.
inline Trace simulate(const ChainSpec& chain, std::size_t n, RngStream& rng) {
  chain.validate();
  detail::check_length(n);
  switch (chain.kind) {
  case ChainKind::iid_normal: return Trace(detail::simulate_iid_values(chain, n, rng));
  case ChainKind::ar1: return Trace(detail::simulate_ar1_values(chain, n, rng));
  case ChainKind::rwm_normal: return detail::simulate_rwm(chain, n, rng).trace;
  }
  throw std::logic_error("unknown chain kind");
}

inline Trace simulate(const ChainSpec& chain, std::size_t n, std::uint64_t seed) {
  RngStream rng = derive_stream(seed, 0);
  return simulate(chain, n, rng);
}

inline Trace simulate_iid_normal(double mu, double sigma, std::size_t n, std::uint64_t seed) {
  return simulate(ChainSpec::iid_normal(mu, sigma), n, seed);
}

// x0 = nullopt starts from the stationary N(0, s^2 / (1 - rho^2)).
inline Trace simulate_ar1(double rho, double s, std::size_t n, std::optional<double> x0,
                          std::uint64_t seed) {
  return simulate(ChainSpec::ar1(rho, s, x0), n, seed);
}

inline RwmRun run_rwm_normal(double proposal_sd, std::size_t n, std::optional<double> x0,
                             std::uint64_t seed) {
  const ChainSpec chain = ChainSpec::rwm_normal(proposal_sd, x0);
  chain.validate();
  detail::check_length(n);
  RngStream rng = derive_stream(seed, 0);
  return detail::simulate_rwm(chain, n, rng);
}

inline Trace simulate_rwm_normal(double proposal_sd, std::size_t n, std::optional<double> x0,
                                 std::uint64_t seed) {
  return run_rwm_normal(proposal_sd, n, x0, seed).trace;
}

// Brute-force V: n_per_run times the variance of `runs` independent run
// means, run r drawing from derive_stream(seed, r).
inline double oracle_true_v(const ChainSpec& chain, std::size_t n_per_run, std::size_t runs,
                            std::uint64_t seed, std::size_t threads = 0) {
  chain.validate();
  detail::check_length(n_per_run);
  if (runs < 100) throw std::invalid_argument("oracle_true_v: needs at least 100 runs");

  std::vector<double> means(runs);
  detail::parallel_for(runs, threads, [&](std::size_t r) {
    RngStream rng = derive_stream(seed, r);
    means[r] = detail::mean(simulate(chain, n_per_run, rng).values());
  });
  return replicated_runs_variance(means, n_per_run).v_hat;
}

} // namespace chebci

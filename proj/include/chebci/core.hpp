#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "chebci/errors.hpp"
#include "chebci/trace.hpp"
#include "chebci/variance.hpp"

namespace chebci {

struct CiConfig {
  double alpha = 0.05;
  double epsilon = 0.001;
  VarianceMethod variance_method = VarianceMethod::batch_means;
  std::size_t burn_in = 0;
  // Batch size for batch means, max lag for the initial sequence estimator.
  std::optional<std::size_t> tuning;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::domain_error("alpha must lie in (0, 1), got " + std::to_string(alpha));
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
      throw std::domain_error("epsilon must be finite and >= 0, got " + std::to_string(epsilon));
  }
};

enum class IntervalMethod { chebyshev, clt };

inline std::string_view to_string(IntervalMethod m) noexcept {
  return m == IntervalMethod::chebyshev ? "chebyshev" : "clt";
}

// Symmetric interval estimate +/- half_width with
// half_width = multiplier * sqrt(v_hat / n).
struct IntervalReport {
  std::size_t n = 0;
  double estimate = 0.0;
  double v_hat = 0.0;
  IntervalMethod method = IntervalMethod::chebyshev;
  double multiplier = 0.0;
  double half_width = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool degenerate = false;
  // Chebyshev interval built with epsilon = 0: the coverage guarantee needs epsilon > 0.
  bool limit_case = false;

  // Strict on both ends; a value on the boundary is not covered.
  bool contains(double value) const noexcept { return lower < value && value < upper; }
};

// Mean of the samples at index >= burn_in, with compensated summation.
inline double mcmc_estimate(const Trace& trace, std::size_t burn_in = 0) {
  if (burn_in >= trace.size())
    throw insufficient_samples("insufficient samples: burn-in " + std::to_string(burn_in) +
                               " leaves nothing of " + std::to_string(trace.size()));
  return detail::mean(trace.values().subspan(burn_in));
}

// alpha^{-1/2} (1 + epsilon).
inline double chebyshev_multiplier(double alpha, double epsilon) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("chebyshev_multiplier: alpha must lie in (0, 1)");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw std::domain_error("chebyshev_multiplier: epsilon must be finite and >= 0");
  return (1.0 + epsilon) / std::sqrt(alpha);
}

// Inverse standard normal CDF, Wichura's AS 241 (PPND16). Relative accuracy
// is about 1e-16 over the whole open interval.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0, 1)");

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }

  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

// z_{1 - alpha/2}.
inline double clt_multiplier(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("clt_multiplier: alpha must lie in (0, 1)");
  return -normal_quantile(0.5 * alpha);
}

namespace detail {

inline IntervalReport make_interval(const Trace& trace, const VarianceEstimate& v,
                                    std::size_t burn_in, IntervalMethod method, double multiplier) {
  if (!(v.v_hat >= 0.0) || !std::isfinite(v.v_hat))
    throw std::invalid_argument("variance estimate must be finite and >= 0, got " +
                                std::to_string(v.v_hat));
  if (burn_in >= trace.size() || trace.size() - burn_in < 2)
    throw insufficient_samples("insufficient samples: interval needs >= 2 samples after burn-in");

  IntervalReport r;
  r.n = trace.size() - burn_in;
  r.estimate = mcmc_estimate(trace, burn_in);
  r.v_hat = v.v_hat;
  r.method = method;
  r.multiplier = multiplier;
  r.half_width = multiplier * std::sqrt(v.v_hat / static_cast<double>(r.n));
  r.lower = r.estimate - r.half_width;
  r.upper = r.estimate + r.half_width;
  r.degenerate = v.v_hat == 0.0;
  return r;
}

} // namespace detail

// e_n +/- alpha^{-1/2}(1+epsilon) sqrt(v_hat/n), with e_n and n taken after
// config.burn_in. v_hat should be estimated from the same post-burn-in samples.
inline IntervalReport chebyshev_interval(const Trace& trace, const VarianceEstimate& v_hat,
                                         const CiConfig& config) {
  config.validate();
  auto r = detail::make_interval(trace, v_hat, config.burn_in, IntervalMethod::chebyshev,
                                 chebyshev_multiplier(config.alpha, config.epsilon));
  r.limit_case = config.epsilon == 0.0;
  return r;
}

// e_n +/- z_{1-alpha/2} sqrt(v_hat/n).
inline IntervalReport clt_interval(const Trace& trace, const VarianceEstimate& v_hat, double alpha,
                                   std::size_t burn_in = 0) {
  return detail::make_interval(trace, v_hat, burn_in, IntervalMethod::clt, clt_multiplier(alpha));
}

struct AnalysisReport {
  CiConfig config;
  VarianceEstimate variance;
  IntervalReport chebyshev;
  IntervalReport clt;
};

// Burn-in, variance estimation, and both intervals in one call.
inline AnalysisReport analyze(const Trace& trace, const CiConfig& config) {
  config.validate();
  const Trace kept = trace.after_burn_in(config.burn_in);
  const VarianceEstimate v = estimate_variance(kept, config.variance_method, config.tuning);
  CiConfig post = config;
  post.burn_in = 0;
  return {config, v, chebyshev_interval(kept, v, post), clt_interval(kept, v, config.alpha)};
}

} // namespace chebci

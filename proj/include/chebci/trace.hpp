#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chebci/errors.hpp"

namespace chebci {

// Functional values h(X_1), ..., h(X_n) of one chain run, in chain order.
// Always non-empty and finite.
class Trace {
public:
  explicit Trace(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("Trace: empty trace");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]))
        throw std::invalid_argument("Trace: non-finite value at index " + std::to_string(i));
    }
  }

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  // Samples with index >= burn_in. Throws insufficient_samples if nothing is left.
  Trace after_burn_in(std::size_t burn_in) const {
    if (burn_in == 0) return *this;
    if (burn_in >= values_.size())
      throw insufficient_samples("insufficient samples: burn-in " + std::to_string(burn_in) +
                                 " leaves nothing of " + std::to_string(values_.size()));
    return Trace(std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(burn_in),
                                     values_.end()));
  }

  friend bool operator==(const Trace&, const Trace&) = default;

private:
  std::vector<double> values_;
};

namespace detail {

// Neumaier compensated sum.
inline double compensated_sum(std::span<const double> xs) noexcept {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

inline double mean(std::span<const double> xs) noexcept {
  return compensated_sum(xs) / static_cast<double>(xs.size());
}

} // namespace detail

} // namespace chebci

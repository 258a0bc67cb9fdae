#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chebci {

// Raised when too few samples remain for an estimator or interval
// (after burn-in, or fewer than two batches/runs).
class insufficient_samples : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed trace file content. line() is 1-based.
class parse_error : public std::runtime_error {
public:
  parse_error(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// Wraps a failure raised inside one replication of a simulation experiment.
class replication_error : public std::runtime_error {
public:
  replication_error(std::size_t replication, const std::string& what)
      : std::runtime_error("replication " + std::to_string(replication) + ": " + what),
        replication_(replication) {}

  std::size_t replication() const noexcept { return replication_; }

private:
  std::size_t replication_;
};

} // namespace chebci

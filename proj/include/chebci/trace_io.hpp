#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "chebci/errors.hpp"
#include "chebci/trace.hpp"

// Trace files: one decimal number per line (scientific exponents allowed),
// optionally preceded by a single non-numeric header line. Blank lines are
// ignored. Any other non-numeric line is a parse_error carrying its line number.

namespace chebci {

class file_not_found : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) noexcept {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(ws) - first + 1);
}

// Whole-field decimal parse; rejects trailing junk, nan and inf.
inline bool parse_real(std::string_view s, double& out) noexcept {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

} // namespace detail

inline Trace parse_trace(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view field = detail::trim(line);
    if (field.empty()) continue;
    double v = 0.0;
    if (detail::parse_real(field, v)) {
      values.push_back(v);
    } else if (!seen_content) {
      // header
    } else {
      throw parse_error(line_no, "not a finite decimal number: '" + std::string(field) + "'");
    }
    seen_content = true;
  }
  if (values.empty()) throw insufficient_samples("insufficient samples: trace file contains no values");
  return Trace(std::move(values));
}

inline Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw file_not_found("cannot open trace file '" + path.string() + "'");
  return parse_trace(in);
}

// Writes the header line then each value in shortest round-trip form, so
// reading the file back reproduces the trace bit for bit.
inline void write_trace(std::ostream& out, const Trace& trace, std::string_view header = "value") {
  out << header << '\n';
  char buf[64];
  for (double v : trace) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
    out.put('\n');
  }
}

inline void write_trace(const std::filesystem::path& path, const Trace& trace,
                        std::string_view header = "value") {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  write_trace(out, trace, header);
  out.flush();
  if (!out) throw io_error("failed writing '" + path.string() + "'");
}

} // namespace chebci

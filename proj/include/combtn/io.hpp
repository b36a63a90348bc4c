#pragma once

// Text formats used by the command-line tool.
//
// Data matrix: no header, one row per site, D comma-separated decimals.
// Sweep table: header `d,x_minus,x_plus,regime`; roots at six decimals,
// empty fields where there are no real roots.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <fmt/format.h>

#include "combtn/costmodel.hpp"
#include "combtn/network.hpp"

namespace combtn {

/// Malformed CSV input; row and column are 1-based.
class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t row, std::size_t column, const std::string& what)
      : std::runtime_error(fmt::format("row {}, column {}: {}", row, column, what)),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Parses a data matrix. If `expected_rows`/`expected_cols` are non-zero the
/// shape is checked too, and the first offending row is reported.
inline DataMatrix read_data_matrix(std::istream& in, std::size_t expected_rows = 0,
                                   std::size_t expected_cols = 0) {
  DataMatrix m;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) {
      // a trailing blank line is fine; anything after it is not
      std::string rest;
      while (std::getline(in, rest)) {
        if (!detail::trim(rest).empty()) throw CsvError(row, 1, "empty row");
      }
      break;
    }
    std::vector<double> values;
    std::string_view sv(line);
    std::size_t col = 0;
    while (true) {
      ++col;
      const auto comma = sv.find(',');
      const auto field = detail::trim(sv.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw CsvError(row, col, "not a decimal number: '" + std::string(field) + "'");
      }
      if (!std::isfinite(v)) throw CsvError(row, col, "value is not finite");
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      sv.remove_prefix(comma + 1);
    }
    if (m.cols == 0) m.cols = values.size();
    if (expected_cols && values.size() != expected_cols) {
      throw CsvError(row, std::min(values.size(), expected_cols) + 1,
                     fmt::format("expected {} values, found {}", expected_cols, values.size()));
    }
    if (values.size() != m.cols) {
      throw CsvError(row, std::min(values.size(), m.cols) + 1,
                     fmt::format("expected {} values like the first row, found {}", m.cols, values.size()));
    }
    if (expected_rows && row > expected_rows) {
      throw CsvError(row, 1, fmt::format("expected {} rows", expected_rows));
    }
    m.values.insert(m.values.end(), values.begin(), values.end());
    ++m.rows;
  }
  if (expected_rows && m.rows != expected_rows) {
    throw CsvError(m.rows + 1, 1, fmt::format("expected {} rows, found {}", expected_rows, m.rows));
  }
  return m;
}

inline void write_data_matrix(std::ostream& out, const DataMatrix& m) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) out << (c ? "," : "") << fmt::format("{:.17g}", m(r, c));
    out << '\n';
  }
}

/// Integral d prints as an integer, otherwise at six decimals.
inline std::string format_d(double d) {
  if (d == std::floor(d) && std::abs(d) < 1e15) return fmt::format("{:.0f}", d);
  return fmt::format("{:.6f}", d);
}

inline std::string format_root(const std::optional<double>& r) {
  return r ? fmt::format("{:.6f}", *r) : std::string();
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "d,x_minus,x_plus,regime\n";
  for (const auto& r : rows) {
    out << format_d(r.d) << ',' << format_root(r.x_minus) << ',' << format_root(r.x_plus) << ','
        << to_string(r.regime) << '\n';
  }
}

}  // namespace combtn

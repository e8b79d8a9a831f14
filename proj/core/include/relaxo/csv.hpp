#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "relaxo/errors.hpp"
#include "relaxo/synth.hpp"

namespace relaxo::io {

/// Malformed CSV input; carries the 1-based row and column of the first
/// violation for the CLI error line.
class CsvError : public InvalidInput {
 public:
  CsvError(const std::string& what, std::size_t row, std::size_t column)
      : InvalidInput(what), row_(row), column_(column) {}
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// Numeric table with a fixed expected header. Values serialized with 17
/// significant digits so a write/read round trip is exact.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(const std::filesystem::path& path, const std::vector<std::string>& expected_header);

/// Writes to a temporary file in the same directory, then renames.
void write_table_atomic(const std::filesystem::path& path, const Table& table);

// Decay-curve schema: tau_us,signal,sigma
synth::DecayCurve read_decay_curve(const std::filesystem::path& path);
void write_decay_curve(const std::filesystem::path& path, const synth::DecayCurve& curve);

std::string format_double(double value);  ///< 17 significant digits

}  // namespace relaxo::io

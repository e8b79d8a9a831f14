#include "relaxo/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace relaxo::io {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_field(const std::string& field, std::size_t row, std::size_t column) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw CsvError("not a number: '" + field + "'", row, column);
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

Table read_table(const std::filesystem::path& path,
                 const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw CsvError("missing header", 1, 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  Table table;
  table.header = split_fields(line);
  if (table.header != expected_header) {
    std::string expected;
    for (std::size_t i = 0; i < expected_header.size(); ++i)
      expected += (i ? "," : "") + expected_header[i];
    throw CsvError("unexpected header, expected '" + expected + "'", 1, 1);
  }

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != expected_header.size())
      throw CsvError("expected " + std::to_string(expected_header.size()) + " fields", row,
                     fields.size() + 1);
    std::vector<double> values;
    values.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      values.push_back(parse_field(fields[c], row, c + 1));
    table.rows.push_back(std::move(values));
  }
  return table;
}

void write_table_atomic(const std::filesystem::path& path, const Table& table) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    for (std::size_t i = 0; i < table.header.size(); ++i)
      out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        out << (i ? "," : "") << format_double(row[i]);
      out << '\n';
    }
  }
  std::filesystem::rename(tmp, path);
}

synth::DecayCurve read_decay_curve(const std::filesystem::path& path) {
  const Table table = read_table(path, {"tau_us", "signal", "sigma"});
  synth::DecayCurve curve;
  for (const auto& row : table.rows) {
    curve.tau_us.push_back(row[0]);
    curve.signal.push_back(row[1]);
    curve.sigma.push_back(row[2]);
  }
  curve.validate();
  return curve;
}

void write_decay_curve(const std::filesystem::path& path, const synth::DecayCurve& curve) {
  curve.validate();
  Table table;
  table.header = {"tau_us", "signal", "sigma"};
  for (std::size_t i = 0; i < curve.size(); ++i)
    table.rows.push_back({curve.tau_us[i], curve.signal[i], curve.sigma[i]});
  write_table_atomic(path, table);
}

}  // namespace relaxo::io

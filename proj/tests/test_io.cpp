#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "relaxo/csv.hpp"
#include "relaxo/errors.hpp"
#include "relaxo/report.hpp"
#include "relaxo/synth.hpp"

using namespace relaxo;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("relaxo_test_" + name);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace

TEST_CASE("decay-curve CSV round trip is exact") {
  synth::GaussianStream rng(77, 0);
  synth::DecayCurve curve;
  double tau = 0.0;
  for (int i = 0; i < 40; ++i) {
    tau += 0.1 + std::abs(rng.next());
    curve.tau_us.push_back(tau);
    curve.signal.push_back(rng.next() * 1e-3 + std::exp(-0.05 * tau));
    curve.sigma.push_back(std::abs(rng.next()) * 1e-2);
  }

  const auto path = temp_file("roundtrip.csv");
  io::write_decay_curve(path, curve);
  const auto read_back = io::read_decay_curve(path);

  CHECK(read_back.tau_us == curve.tau_us);
  CHECK(read_back.signal == curve.signal);
  CHECK(read_back.sigma == curve.sigma);
  std::filesystem::remove(path);
}

TEST_CASE("CSV errors carry row and column") {
  const auto path = temp_file("bad.csv");
  SUBCASE("bad number") {
    write_text(path, "tau_us,signal,sigma\n1.0,0.5,0\n2.0,oops,0\n");
    try {
      io::read_decay_curve(path);
      FAIL("expected CsvError");
    } catch (const io::CsvError& e) {
      CHECK(e.row() == 3);
      CHECK(e.column() == 2);
    }
  }
  SUBCASE("wrong field count") {
    write_text(path, "tau_us,signal,sigma\n1.0,0.5\n");
    CHECK_THROWS_AS(io::read_decay_curve(path), io::CsvError);
  }
  SUBCASE("wrong header") {
    write_text(path, "time,signal,sigma\n1.0,0.5,0\n");
    try {
      io::read_decay_curve(path);
      FAIL("expected CsvError");
    } catch (const io::CsvError& e) {
      CHECK(e.row() == 1);
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("report provenance hashes") {
  const auto input = temp_file("input.csv");
  write_text(input, "tau_us,signal,sigma\n1.0,0.5,0\n");

  io::Report report;
  report.add_input("decay", input);
  report.set("fit.param.rate_khz", 105.3);
  report.set("fit.converged", true);

  const std::string text = report.render();
  const auto entries = io::Report::parse(text);
  CHECK(entries.front().first == "schema_version");
  CHECK(io::Report::verify_inputs(text));

  // tampering with the input invalidates the digest
  write_text(input, "tau_us,signal,sigma\n1.0,0.500001,0\n");
  CHECK_FALSE(io::Report::verify_inputs(text));
  std::filesystem::remove(input);
}

TEST_CASE("atomic table write replaces, never truncates in place") {
  const auto path = temp_file("atomic.csv");
  io::Table table;
  table.header = {"a", "b"};
  table.rows = {{1.0, 2.0}};
  io::write_table_atomic(path, table);
  CHECK(std::filesystem::exists(path));
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));

  const auto read_back = io::read_table(path, {"a", "b"});
  CHECK(read_back.rows == table.rows);
  std::filesystem::remove(path);
}

TEST_CASE("17-digit serialization survives extreme values") {
  for (double value : {1.0 / 3.0, 6.25e3, 1e-300, 123456.789012345678, 0.0}) {
    const std::string text = io::format_double(value);
    CHECK(std::stod(text) == value);
  }
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace relaxo::io {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit content digest, hex-encoded.
std::string fnv1a64_hex(const std::string& bytes);
std::string hash_file(const std::filesystem::path& path);

/// Flat key = value result report, schema-versioned. Deterministic except
/// for the created field; input files are recorded with content digests
/// so provenance can be re-checked.
class Report {
 public:
  Report();

  void add_input(const std::string& name, const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, int value);
  void set(const std::string& key, bool value);

  std::string render() const;
  void write_atomic(const std::filesystem::path& path) const;

  /// Parses a rendered report back into key/value pairs.
  static std::vector<std::pair<std::string, std::string>> parse(const std::string& text);

  /// Re-hashes every input.*.sha entry against the recorded path; returns
  /// false on any mismatch.
  static bool verify_inputs(const std::string& text);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace relaxo::io

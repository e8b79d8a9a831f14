#include "relaxo/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "relaxo/csv.hpp"
#include "relaxo/errors.hpp"

namespace relaxo::io {

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream contents;
  contents << in.rdbuf();
  return fnv1a64_hex(contents.str());
}

Report::Report() {
  set("schema_version", kReportSchemaVersion);
  set("tool_version", std::string(kToolVersion));
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  set("created_utc", std::string(stamp));
}

void Report::add_input(const std::string& name, const std::filesystem::path& path) {
  set("input." + name + ".path", path.string());
  set("input." + name + ".sha", hash_file(path));
}

void Report::set(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

void Report::set(const std::string& key, double value) { set(key, format_double(value)); }

void Report::set(const std::string& key, int value) { set(key, std::to_string(value)); }

void Report::set(const std::string& key, bool value) {
  set(key, std::string(value ? "true" : "false"));
}

std::string Report::render() const {
  std::string text;
  for (const auto& [key, value] : entries_) {
    text += key;
    text += " = ";
    text += value;
    text += '\n';
  }
  return text;
}

void Report::write_atomic(const std::filesystem::path& path) const {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << render();
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::pair<std::string, std::string>> Report::parse(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto sep = line.find(" = ");
    if (sep == std::string::npos) continue;
    entries.emplace_back(line.substr(0, sep), line.substr(sep + 3));
  }
  return entries;
}

bool Report::verify_inputs(const std::string& text) {
  const auto entries = parse(text);
  for (const auto& [key, value] : entries) {
    if (key.rfind("input.", 0) != 0 || key.size() < 5 ||
        key.compare(key.size() - 5, 5, ".path") != 0)
      continue;
    const std::string sha_key = key.substr(0, key.size() - 5) + ".sha";
    for (const auto& [other_key, other_value] : entries) {
      if (other_key == sha_key && hash_file(value) != other_value) return false;
    }
  }
  return true;
}

}  // namespace relaxo::io

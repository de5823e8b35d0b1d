#pragma once

#include <chrono>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

namespace scmm {

// 17 significant digits, enough to round-trip a double.
std::string fmt17(double x);

// CSV with '#'-prefixed metadata lines. The "# generated:" line is the only one that
// changes between identical runs.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_meta(const std::string& key, const std::string& value) { meta.emplace_back(key, value); }
  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
  std::string str(bool timestamp = true) const;
};

std::string utc_timestamp();

// Writes text to path, creating parent directories. Throws std::runtime_error on failure.
void write_text(const std::string& path, const std::string& text);

// Record of one command invocation and every file it wrote.
struct RunManifest {
  std::string command;
  std::string config_path;
  nlohmann::json overrides = nlohmann::json::object();
  std::string output_dir;
  std::string tool_version;
  double wall_seconds = 0.0;
  std::vector<std::string> files;  // relative to output_dir
  int exit_code = 0;

  nlohmann::json to_json() const;
};

}  // namespace scmm

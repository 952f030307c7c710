#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sparse_jacobi/io/artifacts.hpp"
#include "sparse_jacobi/io/config.hpp"

namespace sparse_jacobi::io {

enum ExitCode : int { kOk = 0, kConfig = 1, kTolerance = 2, kDomain = 3 };

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct Outcome {
  std::vector<Check> checks;
  Json summary = Json::object();
  std::map<std::string, CsvTable> tables;  // artifact stem -> table

  bool passed() const;
};

// Runs the computation for cfg.command; nothing is written.
Outcome execute(const RunConfig& cfg);

// Content-addressed directory for a config: output.dir / first 16 hex digits of the hash.
std::filesystem::path run_directory(const RunConfig& cfg);

// Writes tables, manifest.json and config.yaml into the run directory; returns it.
std::filesystem::path persist(const RunConfig& cfg, const Outcome& out);

// Full pipeline with exit codes: 0 all checks pass, 1 config, 2 tolerance or failed check, 3 domain.
int run(std::string_view command, const std::string& config_path, const std::vector<Override>& overrides,
        std::ostream& out, std::ostream& err);

// Tables each command writes, used by report to name missing files.
std::vector<std::string> expected_tables(std::string_view command);

struct ReportSummary {
  std::string command;
  std::string text;
  int checks_passed = 0;
  int checks_failed = 0;
  int cells_passed = 0;  // certificate cells, gevrey-verify only
  int cells_failed = 0;
};

// Throws ConfigError naming missing artifacts.
ReportSummary report(const std::filesystem::path& run_dir);
int run_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

}  // namespace sparse_jacobi::io

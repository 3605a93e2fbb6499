#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "report_io.hpp"

namespace qavg::cli {

struct CheckResult {
  std::string label;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
};

struct Outcome {
  /// Command-specific result object, embedded under "result".
  Json result;
  /// Schedules and tolerances the numbers depend on.
  Json settings = Json::object();
  std::vector<CheckResult> checks;
  /// Key numbers for the human summary.
  std::vector<std::pair<std::string, std::string>> headline;
  /// CSV outputs, written as <command>_<name>.csv.
  std::vector<std::pair<std::string, CsvTable>> tables;
};

/// Runs the computation without touching the file system.
Outcome run(const RunConfig& config);

/// Full report document for an outcome; `status` is "ok", "partial" or "failed".
Json report_document(const RunConfig& config, const Outcome& outcome, const std::string& status,
                     const std::string& error = {});

/// Runs, writes the JSON report and CSV tables under --out and prints a
/// summary to `out`. Returns 0 on success and 1 on a runtime failure, in
/// which case a report marked "partial" or "failed" is still written.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point: 0 success, 1 runtime failure, 2 usage.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qavg::cli

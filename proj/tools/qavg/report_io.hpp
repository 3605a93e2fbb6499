#pragma once

// JSON and CSV emission. Field names and CSV headers are a stable interface;
// numbers are written in shortest round-trip form so identical runs produce
// identical bytes.

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qavg/extrapolation.hpp"
#include "qavg/ideal_bose.hpp"
#include "qavg/quasi_average.hpp"
#include "qavg/spin_ferromagnet.hpp"

namespace qavg::cli {

using Json = nlohmann::ordered_json;

inline const std::vector<std::string> kModeHeader{"nx", "ny", "nz", "energy",
                                                  "occupation_density"};
inline const std::vector<std::string> kTraceHeader{
    "volume", "amplitude", "mu", "selected_mode_density", "source_term", "band_density"};
inline const std::vector<std::string> kSpinHeader{"N", "beta", "B", "mx", "my", "mz",
                                                  "energy_per_site"};

/// Shortest decimal that reads back to the same double.
std::string format_number(double value);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& cells);
  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  /// RFC 4180: CRLF line ends, fields quoted only when needed.
  std::string render() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

CsvTable mode_table(const std::vector<ModeDensity>& modes);
CsvTable trace_table(const std::vector<TraceRow>& trace);
CsvTable spin_table(const std::vector<LimitOrderRow>& rows);

Json to_json(const ModeIndex& index);
Json to_json(std::complex<double> z);
Json to_json(const PowerLawFit& fit);
Json to_json(const FitOptions& options);
Json to_json(const LimitOptions& options);
Json to_json(const ClassifierOptions& options);
Json to_json(const CondensateReport& report);
Json to_json(const LimitSchedule& schedule);
Json to_json(const QuasiAverageResult& result);
Json to_json(const LemmaReport& report);
Json to_json(const LimitOrderStudy& study);

/// Two-space indented dump with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& doc);

}  // namespace qavg::cli

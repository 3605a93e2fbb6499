#include "report_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace qavg::cli {

namespace {

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Json vector_json(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Json vec3_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), end);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& cells) {
  if (cells.size() != header_.size()) throw std::logic_error("CSV row width mismatch");
  std::vector<std::string> row;
  row.reserve(cells.size());
  for (double c : cells) row.push_back(format_number(c));
  rows_.push_back(std::move(row));
}

std::string CsvTable::render() const {
  std::string out;
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += quote_if_needed(fields[i]);
    }
    out += "\r\n";
  };
  emit(header_);
  for (const auto& row : rows_) emit(row);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, render()); }

CsvTable mode_table(const std::vector<ModeDensity>& modes) {
  CsvTable t(kModeHeader);
  for (const auto& m : modes) {
    t.add_row({static_cast<double>(m.mode.index[0]), static_cast<double>(m.mode.index[1]),
               static_cast<double>(m.mode.index[2]), m.mode.energy, m.density});
  }
  return t;
}

CsvTable trace_table(const std::vector<TraceRow>& trace) {
  CsvTable t(kTraceHeader);
  for (const auto& r : trace) {
    t.add_row({r.volume, r.amplitude, r.mu, r.selected_mode_density, r.source_term,
               r.band_density});
  }
  return t;
}

CsvTable spin_table(const std::vector<LimitOrderRow>& rows) {
  CsvTable t(kSpinHeader);
  for (const auto& r : rows) {
    t.add_row({static_cast<double>(r.sites), r.beta, r.field, r.magnetization[0],
               r.magnetization[1], r.magnetization[2], r.energy_per_site});
  }
  return t;
}

Json to_json(const ModeIndex& index) { return Json::array({index[0], index[1], index[2]}); }

Json to_json(std::complex<double> z) {
  return Json{{"re", z.real()}, {"im", z.imag()}, {"modulus", std::abs(z)}, {"arg", std::arg(z)}};
}

Json to_json(const PowerLawFit& fit) {
  return Json{{"limit", fit.limit},
              {"amplitude", fit.amplitude},
              {"exponent", fit.exponent},
              {"residual", fit.residual},
              {"relative_residual", fit.relative_residual},
              {"points", fit.points}};
}

Json to_json(const FitOptions& options) {
  return Json{{"min_exponent", options.min_exponent}, {"max_exponent", options.max_exponent}};
}

Json to_json(const LimitOptions& options) {
  return Json{{"fit", to_json(options.fit)},
              {"pure_power_residual", options.pure_power_residual},
              {"pure_power_min_exponent", options.pure_power_min_exponent}};
}

Json to_json(const ClassifierOptions& options) {
  Json tracked = Json::array();
  for (const auto& m : options.tracked_modes) tracked.push_back(to_json(m));
  return Json{{"macroscopic_fraction", options.macroscopic_fraction},
              {"type_tolerance", options.type_tolerance},
              {"tracked_modes", tracked},
              {"band_radius_start", options.band_radius_start},
              {"band_radius_count", options.band_radius_count},
              {"mode_fit", to_json(options.mode_fit)},
              {"band_fit", to_json(options.band_fit)},
              {"report_modes", options.report_modes}};
}

Json to_json(const CondensateReport& report) {
  Json per_mode = Json::array();
  for (const auto& m : report.per_mode) {
    per_mode.push_back(
        Json{{"index", to_json(m.mode.index)}, {"energy", m.mode.energy}, {"density", m.density}});
  }
  Json samples = Json::array();
  for (const auto& s : report.samples) {
    samples.push_back(Json{{"volume", s.volume},
                           {"mu", s.mu},
                           {"total_density", s.total_density},
                           {"tracked_densities", vector_json(s.tracked_densities)},
                           {"band_densities", vector_json(s.band_densities)}});
  }
  Json mode_limits = Json::array();
  for (const auto& m : report.mode_limits) {
    mode_limits.push_back(Json{{"index", to_json(m.index)},
                               {"limit", m.limit},
                               {"log_log_slope", m.log_log_slope},
                               {"macroscopic", m.macroscopic},
                               {"vanishing", m.vanishing},
                               {"fit", to_json(m.fit)}});
  }
  Json band_limits = Json::array();
  for (const auto& b : report.band_limits) {
    band_limits.push_back(Json{{"radius", b.radius}, {"limit", b.limit}, {"fit", to_json(b.fit)}});
  }
  return Json{{"alpha1", report.alpha1},
              {"beta", report.beta},
              {"mu_solution", report.mu_solution},
              {"total_density", report.total_density},
              {"critical_density", report.critical_density},
              {"condensate_density", report.condensate_density},
              {"band_density", report.band_density},
              {"max_mode_density", report.max_mode_density},
              {"verdict", std::string(to_string(report.verdict))},
              {"rationale", report.rationale},
              {"per_mode", per_mode},
              {"options", to_json(report.options)},
              {"samples", samples},
              {"mode_limits", mode_limits},
              {"band_limits", band_limits},
              {"band_radius_fit", to_json(report.band_radius_fit)}};
}

Json to_json(const LimitSchedule& schedule) {
  return Json{{"volumes", vector_json(schedule.volumes)},
              {"amplitudes", vector_json(schedule.amplitudes)},
              {"fit_model", "constant_plus_power"},
              {"tolerance", schedule.tolerance}};
}

Json to_json(const QuasiAverageResult& result) {
  Json trace = Json::array();
  for (const auto& r : result.mu_trace) {
    trace.push_back(Json{{"volume", r.volume},
                         {"amplitude", r.amplitude},
                         {"mu", r.mu},
                         {"selected_mode_density", r.selected_mode_density},
                         {"source_term", r.source_term},
                         {"band_density", r.band_density}});
  }
  Json convergence = Json::array();
  for (const auto& c : result.convergence) {
    convergence.push_back(Json{{"quantity", c.quantity},
                               {"amplitude", c.amplitude},
                               {"fit", to_json(c.fit)},
                               {"inconclusive", c.inconclusive}});
  }
  Json offmodes = Json::array();
  for (const auto& m : result.offmode_indices) offmodes.push_back(to_json(m));
  Json source{{"amplitude", result.source.amplitude},
              {"phase", result.source.phase},
              {"mode_index", to_json(result.source.mode_index)}};
  return Json{{"ssb_parameter", to_json(result.ssb_parameter)},
              {"bec_density", result.bec_density},
              {"odlro_density", result.odlro_density},
              {"offmode_max", result.offmode_max},
              {"unsourced_selected_density", result.unsourced_selected_density},
              {"inconclusive", result.inconclusive},
              {"alpha1", result.alpha1},
              {"beta", result.beta},
              {"rho", result.rho},
              {"critical_density", result.critical_density},
              {"source", source},
              {"schedule", to_json(result.schedule)},
              {"band_radius", result.band_radius},
              {"offmode_indices", offmodes},
              {"convergence", convergence},
              {"mu_trace", trace}};
}

Json to_json(const LemmaReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back(Json{{"amplitude", r.amplitude},
                        {"mu_limit", r.mu_limit},
                        {"mu_infinite", r.mu_infinite},
                        {"correction", r.correction},
                        {"correction_ratio", r.correction_ratio},
                        {"mu_ratio", r.mu_ratio},
                        {"fit", to_json(r.fit)},
                        {"inconclusive", r.inconclusive}});
  }
  return Json{{"beta", report.beta},
              {"rho", report.rho},
              {"excess", report.excess},
              {"alpha1", report.alpha1},
              {"correction_positive", report.correction_positive},
              {"ratio_decreasing", report.ratio_decreasing},
              {"inconclusive", report.inconclusive},
              {"schedule", to_json(report.schedule)},
              {"rows", rows}};
}

Json to_json(const LimitOrderStudy& study) {
  Json rows = Json::array();
  for (const auto& r : study.rows) {
    rows.push_back(Json{{"N", r.sites},
                        {"beta", r.beta},
                        {"B", r.field},
                        {"magnetization", vec3_json(r.magnetization)},
                        {"energy_per_site", r.energy_per_site}});
  }
  return Json{{"vanishes_with_field", study.vanishes_with_field},
              {"increases_with_size", study.increases_with_size},
              {"limit_claimed", study.limit_claimed},
              {"rows", rows}};
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

}  // namespace qavg::cli

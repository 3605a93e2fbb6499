#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "qavg/errors.hpp"
#include "qavg/ideal_bose.hpp"
#include "qavg/interacting_diagonal.hpp"
#include "qavg/quasi_average.hpp"
#include "qavg/spin_ferromagnet.hpp"

namespace qavg::cli {

namespace {

std::string num(double x) {
  std::ostringstream out;
  out << std::setprecision(10) << x;
  return out.str();
}

CheckResult below(std::string label, double value, double bound) {
  return {std::move(label), value <= bound, value, bound};
}

CheckResult holds(std::string label, bool ok) { return {std::move(label), ok, ok ? 1.0 : 0.0, 1.0}; }

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

Json schedule_json(const GeometricSpec& spec) {
  return Json{{"spec", spec.text()}, {"values", spec.values()}};
}

Outcome critical_density_run(const RunConfig& c) {
  const double beta = c.real("beta");
  constexpr double kTolerance = 1e-9;
  const double value = critical_density(beta);
  const double closed_form = std::riemann_zeta(1.5) / std::pow(4.0 * kPi * beta, 1.5);
  Outcome o;
  o.result = Json{{"beta", beta}, {"critical_density", value}};
  o.settings = Json{{"relative_tolerance", kTolerance}};
  o.headline = {{"critical density", num(value)}};
  o.checks.push_back(below("critical density agrees with the zeta closed form (relative)",
                           relative(value, closed_form), kTolerance));
  return o;
}

Outcome solve_mu_run(const RunConfig& c) {
  const double beta = c.real("beta"), rho = c.real("rho"), volume = c.real("volume");
  const double alpha1 = c.real("alpha1");
  const auto geom = BoxGeometry::elongated(volume, alpha1);
  const double mu = solve_mu(geom, beta, rho);
  const double residual = relative(finite_volume_density(geom, beta, mu), rho);
  const auto modes = mode_occupations(geom, beta, mu, c.count("modes"));
  Outcome o;
  o.result = Json{{"volume", volume},
                  {"alpha1", alpha1},
                  {"beta", beta},
                  {"rho", rho},
                  {"mu", mu},
                  {"mu_infinite_volume", solve_mu_infinite(beta, rho)},
                  {"critical_density", critical_density(beta)},
                  {"density_residual", residual}};
  o.settings = Json{{"root_tolerance", kDensityRootTolerance}};
  o.headline = {{"mu", num(mu)}, {"V * mu", num(volume * mu)}};
  o.checks.push_back(below("density equation residual (relative)", residual, 1e-11));
  o.checks.push_back(holds("chemical potential below the spectrum bottom", mu < 0.0));
  o.tables.emplace_back("modes", mode_table(modes));
  return o;
}

void add_condensate_headline(Outcome& o, const CondensateReport& r) {
  o.headline = {{"verdict", std::string(to_string(r.verdict))},
                {"band density limit", num(r.band_density)},
                {"largest single-mode limit", num(r.max_mode_density)},
                {"rho - rho_c (ideal gas)", num(r.total_density - r.critical_density)}};
}

Outcome classify_run(const RunConfig& c) {
  const double beta = c.real("beta"), rho = c.real("rho"), alpha1 = c.real("alpha1");
  const auto volumes = c.schedule("volumes");
  ClassifierOptions options;
  options.report_modes = c.count("modes");
  const auto report = classify_condensation(alpha1, beta, rho, volumes.values(), options);
  Outcome o;
  o.result = to_json(report);
  o.settings = Json{{"volumes", schedule_json(volumes)}, {"classifier", to_json(options)}};
  add_condensate_headline(o, report);
  const double excess = rho - critical_density(beta);
  if (excess > 0.0) {
    o.checks.push_back(below("band density limit matches rho - rho_c (relative)",
                             relative(report.band_density, excess), options.type_tolerance));
  }
  o.tables.emplace_back("modes", mode_table(report.per_mode));
  return o;
}

Outcome quasi_average_run(const RunConfig& c) {
  const double beta = c.real("beta"), rho = c.real("rho"), alpha1 = c.real("alpha1");
  const double phi = c.real("phi");
  const auto volumes = c.schedule("volumes"), amplitudes = c.schedule("amplitudes");
  LimitSchedule schedule;
  schedule.volumes = volumes.values();
  schedule.amplitudes = amplitudes.values();
  schedule.tolerance = c.real("tolerance");
  const SourceField selection(0.0, 0.0, c.index("mode"));
  const QuasiAverageOptions options;
  const auto r = run_quasi_average(alpha1, beta, rho, phi, schedule, selection, options);

  const double excess = rho - r.critical_density;
  const double modulus = std::abs(r.ssb_parameter);
  const double phase_error =
      std::abs(std::remainder(std::arg(r.ssb_parameter) - r.source.phase, 2.0 * kPi));
  Outcome o;
  o.result = to_json(r);
  o.settings = Json{{"volumes", schedule_json(volumes)},
                    {"amplitudes", schedule_json(amplitudes)},
                    {"fit_tolerance", schedule.tolerance},
                    {"density_root_tolerance", kDensityRootTolerance},
                    {"band_radius", options.band_radius}};
  o.headline = {{"|order parameter|", num(modulus)},
                {"arg order parameter", num(std::arg(r.ssb_parameter))},
                {"condensate density", num(r.bec_density)},
                {"ODLRO density", num(r.odlro_density)},
                {"rho - rho_c", num(excess)}};
  o.checks.push_back(below("|order parameter|^2 equals the condensate density (relative)",
                           relative(modulus * modulus, r.bec_density), 0.01));
  o.checks.push_back(below("order parameter phase follows the source phase (rad)", phase_error,
                           1e-3));
  o.checks.push_back(below("condensate density equals rho - rho_c (relative)",
                           relative(r.bec_density, excess), 0.01));
  o.checks.push_back(below("ODLRO density equals the condensate density (relative)",
                           relative(r.odlro_density, r.bec_density), 0.01));
  o.checks.push_back(below("non-selected mode densities vanish", r.offmode_max, 1e-4));
  // Without a source only long boxes leave the selected mode empty; in short
  // boxes the zero mode takes the whole excess. The marginal case is skipped.
  const bool zero_mode = c.index("mode") == ModeIndex{0, 0, 0};
  if (alpha1 > 0.5 || (alpha1 < 0.5 && !zero_mode)) {
    o.checks.push_back(below("selected mode stays empty without a source",
                             r.unsourced_selected_density, 1e-3));
  } else if (alpha1 < 0.5) {
    o.checks.push_back(below("zero mode holds the excess without a source (relative)",
                             relative(r.unsourced_selected_density, excess), 0.01));
  }
  o.checks.push_back(holds("every extrapolation within the fit tolerance", !r.inconclusive));
  o.tables.emplace_back("trace", trace_table(r.mu_trace));
  return o;
}

Outcome lemma_run(const RunConfig& c) {
  const double beta = c.real("beta"), rho = c.real("rho"), alpha1 = c.real("alpha1");
  const auto volumes = c.schedule("volumes"), amplitudes = c.schedule("amplitudes");
  LimitSchedule schedule;
  schedule.volumes = volumes.values();
  schedule.amplitudes = amplitudes.values();
  schedule.tolerance = c.real("tolerance");
  const auto r = lemma41_check(beta, rho, schedule, alpha1);

  const auto& last = r.rows.back();
  const double leading = -1.0 / std::sqrt(r.excess);
  Outcome o;
  o.result = to_json(r);
  o.settings = Json{{"volumes", schedule_json(volumes)},
                    {"amplitudes", schedule_json(amplitudes)},
                    {"fit_tolerance", schedule.tolerance},
                    {"density_root_tolerance", kDensityRootTolerance}};
  o.headline = {{"leading slope -1/sqrt(rho - rho_c)", num(leading)},
                {"mu/lambda at the smallest source", num(last.mu_ratio)},
                {"correction/lambda at the smallest source", num(last.correction_ratio)}};
  o.checks.push_back(holds("correction to the leading law is positive", r.correction_positive));
  o.checks.push_back(holds("correction/lambda decreases as the source shrinks", r.ratio_decreasing));
  o.checks.push_back(below("correction/lambda at the smallest source", last.correction_ratio, 0.1));
  o.checks.push_back(below("infinite-volume mu/lambda approaches the leading slope (relative)",
                           relative(last.mu_infinite / last.amplitude, leading), 0.02));
  o.checks.push_back(holds("every volume limit within the fit tolerance", !r.inconclusive));

  CsvTable table({"amplitude", "mu_limit", "mu_infinite", "correction", "correction_ratio",
                  "mu_ratio"});
  for (const auto& row : r.rows) {
    table.add_row({row.amplitude, row.mu_limit, row.mu_infinite, row.correction,
                   row.correction_ratio, row.mu_ratio});
  }
  o.tables.emplace_back("table", std::move(table));
  return o;
}

Outcome pressure_run(const RunConfig& c) {
  const double beta = c.real("beta"), alpha1 = c.real("alpha1"), volume = c.real("volume");
  const double step = c.real("step"), tolerance = c.real("tolerance");
  const std::size_t points = c.count("points");
  const auto geom = BoxGeometry::elongated(volume, alpha1);

  std::mt19937_64 rng(c.seed("seed"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Json samples = Json::array();
  double worst_derivative = 0.0;
  double lowest_curvature = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double mu = -std::pow(10.0, -3.0 + 3.0 * unit(rng));
    const double amplitude = std::pow(10.0, -3.0 + 2.0 * unit(rng));
    const double phase = 2.0 * kPi * unit(rng);
    const SourceField src(amplitude, phase);
    const auto analytic = pressure_wirtinger(mu, src);
    const auto numeric = pressure_wirtinger_numeric(geom, beta, mu, src, step * amplitude);
    const double error = std::abs(numeric - analytic) / std::abs(analytic);
    const double h = step * amplitude;
    const double curvature = pressure(geom, beta, mu, SourceField(amplitude + h, phase)) -
                             2.0 * pressure(geom, beta, mu, src) +
                             pressure(geom, beta, mu, SourceField(amplitude - h, phase));
    worst_derivative = std::max(worst_derivative, error);
    lowest_curvature = std::min(lowest_curvature, curvature);
    samples.push_back(Json{{"mu", mu},
                           {"amplitude", amplitude},
                           {"phase", phase},
                           {"analytic", to_json(analytic)},
                           {"numeric", to_json(numeric)},
                           {"relative_error", error},
                           {"second_difference", curvature}});
  }
  Outcome o;
  o.result = Json{{"volume", volume},
                  {"alpha1", alpha1},
                  {"beta", beta},
                  {"max_relative_error", worst_derivative},
                  {"min_second_difference", lowest_curvature},
                  {"samples", samples}};
  o.settings = Json{{"points", points},
                    {"seed", c.seed("seed")},
                    {"relative_step", step},
                    {"relative_tolerance", tolerance},
                    {"convexity_floor", -1e-10},
                    {"mu_range", {-1.0, -1e-3}},
                    {"amplitude_range", {1e-3, 1e-1}}};
  o.headline = {{"largest relative derivative error", num(worst_derivative)},
                {"smallest second difference", num(lowest_curvature)}};
  o.checks.push_back(below("analytic source derivative matches central differences (relative)",
                           worst_derivative, tolerance));
  o.checks.push_back({"pressure convex in the source amplitude", lowest_curvature >= -1e-10,
                      lowest_curvature, -1e-10});
  return o;
}

Outcome interacting_run(const RunConfig& c) {
  const double coupling = c.real("coupling"), beta = c.real("beta"), rho = c.real("rho");
  const double alpha1 = c.real("alpha1");
  const auto volumes = c.schedule("volumes");
  ClassifierOptions options;
  options.report_modes = c.count("modes");
  const auto report = classify_interacting(coupling, alpha1, beta, rho, volumes.values(), options);
  const DiagonalModel model(coupling, BoxGeometry::elongated(volumes.values().back(), alpha1));
  const double residual = relative(interacting_density(model, beta, report.mu_solution), rho);
  Outcome o;
  o.result = to_json(report);
  o.result["coupling"] = coupling;
  o.result["density_residual"] = residual;
  o.settings = Json{{"volumes", schedule_json(volumes)},
                    {"classifier", to_json(options)},
                    {"root_tolerance", kInteractingRootTolerance}};
  add_condensate_headline(o, report);
  o.checks.push_back(holds("no single mode macroscopic while the band is",
                           report.verdict == Verdict::type_iii));
  o.checks.push_back(below("density equation residual at the largest volume (relative)", residual,
                           1e-10));
  o.tables.emplace_back("modes", mode_table(report.per_mode));
  return o;
}

Vec3 normalized(Vec3 v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  for (double& x : v) x /= n;
  return v;
}

Outcome spin_run(const RunConfig& c) {
  const double beta = c.real("beta"), field = c.real("B");
  const std::size_t max_sites = c.count("max-sites");
  const auto dims = c.ints("dims");
  const SpinLattice lattice = dims.empty()
                                  ? SpinLattice::chain(static_cast<int>(c.count("sites")), max_sites)
                                  : SpinLattice(dims, max_sites);
  const Vec3 direction = normalized(c.vec3("direction"));
  const auto state = thermal_expectations(lattice, FieldSpec(field, direction), beta);
  const double odlro = odlro_moment(lattice, beta);
  const auto& m = state.magnetization;

  Outcome o;
  o.result = Json{{"dimensions", lattice.dimensions()},
                  {"sites", lattice.site_count()},
                  {"bonds", lattice.bonds().size()},
                  {"beta", beta},
                  {"B", field},
                  {"direction", direction},
                  {"magnetization", m},
                  {"energy_per_site", state.energy_per_site},
                  {"odlro_moment", odlro}};
  o.headline = {{"m", "(" + num(m[0]) + ", " + num(m[1]) + ", " + num(m[2]) + ")"},
                {"energy per site", num(state.energy_per_site)},
                {"zero-field <|m|^2>", num(odlro)}};
  const double norm = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
  if (field == 0.0) {
    o.checks.push_back(below("zero-field magnetization vanishes", norm, 1e-13));
  } else {
    const Vec3 cross{m[1] * direction[2] - m[2] * direction[1],
                     m[2] * direction[0] - m[0] * direction[2],
                     m[0] * direction[1] - m[1] * direction[0]};
    const double transverse = std::sqrt(cross[0] * cross[0] + cross[1] * cross[1] +
                                        cross[2] * cross[2]);
    o.checks.push_back(below("magnetization parallel to the field", transverse, 1e-10));
    if (lattice.site_count() <= 10) {
      const auto rotation = rotation_matrix(normalized({1.0, 1.0, 1.0}), 0.7);
      const auto rep = rotation_covariance_check(lattice, beta, field, direction, rotation);
      o.result["rotation_covariance_deviation"] = rep.max_deviation;
      o.checks.push_back(below("rotating the field rotates the magnetization", rep.max_deviation,
                               1e-10));
    }
  }
  o.settings = Json{{"max_sites", max_sites}};
  LimitOrderRow row{static_cast<int>(lattice.site_count()), beta, field, m, state.energy_per_site};
  o.tables.emplace_back("table", spin_table({row}));
  return o;
}

Outcome limit_order_run(const RunConfig& c) {
  const double beta = c.real("beta");
  const auto fields = c.reals("fields");
  const auto sizes = c.ints("sizes");
  const auto study = limit_order_study(beta, fields, sizes, c.count("max-sites"));
  Outcome o;
  o.result = to_json(study);
  o.result["beta"] = beta;
  o.settings = Json{{"fields", fields}, {"sizes", sizes}, {"max_sites", c.count("max-sites")},
                    {"zero_field_tolerance", 1e-13}};
  o.headline = {{"rows", std::to_string(study.rows.size())},
                {"thermodynamic limit", "not extrapolated"}};
  o.checks.push_back(holds("m_z shrinks to zero with the field at each size",
                           study.vanishes_with_field));
  o.checks.push_back(holds("m_z grows with the chain length at each positive field",
                           study.increases_with_size));
  o.tables.emplace_back("table", spin_table(study.rows));
  return o;
}

std::filesystem::path json_path(const RunConfig& c) {
  return std::filesystem::path(c.text("out")) / (std::string(command_name(c.command)) + ".json");
}

std::filesystem::path table_path(const RunConfig& c, const std::string& name) {
  return std::filesystem::path(c.text("out")) /
         (std::string(command_name(c.command)) + "_" + name + ".csv");
}

}  // namespace

Outcome run(const RunConfig& config) {
  switch (config.command) {
    case Command::critical_density: return critical_density_run(config);
    case Command::solve_mu: return solve_mu_run(config);
    case Command::classify: return classify_run(config);
    case Command::quasi_average: return quasi_average_run(config);
    case Command::lemma41: return lemma_run(config);
    case Command::pressure_check: return pressure_run(config);
    case Command::interacting: return interacting_run(config);
    case Command::spin_ed: return spin_run(config);
    case Command::limit_order: return limit_order_run(config);
  }
  throw UsageError("unhandled command");
}

Json report_document(const RunConfig& config, const Outcome& outcome, const std::string& status,
                     const std::string& error) {
  Json parameters = Json::object();
  for (const auto& [key, value] : config.parameters) {
    if (key != "out") parameters[key] = value;
  }
  Json checks = Json::array();
  for (const auto& c : outcome.checks) {
    checks.push_back(
        Json{{"label", c.label}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound}});
  }
  Json outputs = Json::array();
  for (const auto& [name, table] : outcome.tables) {
    outputs.push_back(table_path(config, name).filename().string());
  }
  Json doc{{"command", std::string(command_name(config.command))},
           {"status", status},
           {"parameters", parameters},
           {"settings", outcome.settings},
           {"result", outcome.result},
           {"checks", checks},
           {"csv_outputs", outputs}};
  if (!error.empty()) doc["error"] = error;
  return doc;
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto path = json_path(config);
  try {
    Outcome outcome;
    std::string status = "ok", error;
    try {
      outcome = run(config);
    } catch (const ClassificationError& e) {
      status = "partial";
      error = e.what();
      outcome.result = to_json(e.report());
    } catch (const std::exception& e) {
      status = "failed";
      error = e.what();
    }
    write_json(path, report_document(config, outcome, status, error));
    for (const auto& [name, table] : outcome.tables) table.write(table_path(config, name));

    out << "qavg " << command_name(config.command) << "\n";
    for (const auto& [label, value] : outcome.headline) out << "  " << label << ": " << value << "\n";
    for (const auto& c : outcome.checks) {
      out << "  " << c.label << ": " << (c.passed ? "PASS" : "FAIL") << " (" << num(c.value)
          << " vs " << num(c.bound) << ")\n";
    }
    out << "  report: " << path.string() << (status == "ok" ? "" : " [" + status + "]") << "\n";
    if (status != "ok") {
      err << "qavg " << command_name(config.command) << ": " << error << "\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "qavg " << command_name(config.command) << ": cannot write outputs: " << e.what()
        << "\n";
    return 1;
  }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_config(args);
  } catch (const HelpRequest& h) {
    out << h.what();
    return 0;
  } catch (const UsageError& e) {
    err << "qavg: " << e.what() << "\n";
    return 2;
  }
  return execute(config, out, err);
}

}  // namespace qavg::cli

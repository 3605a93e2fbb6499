// Acceptance suite: one PASS/FAIL line per criterion. Takes the path of the
// qavg executable as its only argument; criteria 1 and 10 drive the tool
// end to end, the rest call the library directly.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qavg/ideal_bose.hpp"
#include "qavg/interacting_diagonal.hpp"
#include "qavg/quasi_average.hpp"
#include "qavg/spin_ferromagnet.hpp"
#include "report_io.hpp"

using namespace qavg;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_tool(const std::string& tool, const std::string& args) {
  const std::string cmd = "\"" + tool + "\" " + args + " > /dev/null";
  return std::system(cmd.c_str());
}

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

// 1. Critical density through the tool against zeta(3/2) / (4 pi)^(3/2).
Outcome critical_density_criterion(const std::string& tool) {
  constexpr double kTolerance = 1e-9, kSeconds = 1.0;
  Outcome v;
  const auto t0 = std::chrono::steady_clock::now();
  const int status = run_tool(tool, "critical-density --beta 1 --out acc_c1");
  const double elapsed = seconds_since(t0);
  v.require(status == 0, "exit status 0");
  const auto doc = cli::Json::parse(slurp("acc_c1/critical-density.json"));
  const double value = doc["result"]["critical_density"].get<double>();
  const double oracle = std::riemann_zeta(1.5) / std::pow(4.0 * kPi, 1.5);
  v.require(relative(value, oracle) <= kTolerance,
            "rho_c=" + fmt(value) + " rel.err=" + fmt(relative(value, oracle)));
  v.require(elapsed < kSeconds, "time=" + fmt(elapsed) + "s");
  return v;
}

// 2. alpha1 = 0.4, rho = rho_c + 0.1: V |mu_V| -> 1 / (beta * 0.1) = 10.
Outcome mu_law_criterion() {
  constexpr double kExcess = 0.1, kTolerance = 0.05, kSeconds = 60.0;
  Outcome v;
  const auto t0 = std::chrono::steady_clock::now();
  const double rho = critical_density(1.0) + kExcess;
  std::vector<double> volumes, scaled;
  for (int m = 0; m <= 8; ++m) volumes.push_back(1e3 * std::pow(10.0, 0.5 * m));
  for (double vol : volumes) {
    scaled.push_back(vol * std::abs(solve_mu(BoxGeometry::elongated(vol, 0.4), 1.0, rho)));
  }
  const auto fit = fit_constant_plus_power(volumes, scaled);
  const double target = 1.0 / (1.0 * kExcess);
  v.require(relative(fit.limit, target) <= kTolerance,
            "V|mu| limit=" + fmt(fit.limit) + " (largest V: " + fmt(scaled.back()) + ")");
  v.require(seconds_since(t0) < kSeconds, "time=" + fmt(seconds_since(t0)) + "s");
  return v;
}

// 3 and 4. Verdicts on the default classifier schedule.
Outcome classification_criterion(CondensateReport& type_iii) {
  constexpr double kSeconds = 300.0;
  Outcome v;
  const auto t0 = std::chrono::steady_clock::now();
  const double rho = critical_density(1.0) + 0.1;
  const auto volumes = geometric_schedule(1e4, 10.0, 7);
  const std::vector<std::pair<double, qavg::Verdict>> cases{
      {0.4, qavg::Verdict::type_i}, {0.5, qavg::Verdict::type_ii}, {0.6, qavg::Verdict::type_iii}};
  for (const auto& [alpha1, expected] : cases) {
    try {
      auto report = classify_condensation(alpha1, 1.0, rho, volumes);
      v.require(report.verdict == expected,
                "alpha1=" + fmt(alpha1) + " " + std::string(to_string(report.verdict)));
      if (expected == qavg::Verdict::type_iii) type_iii = std::move(report);
    } catch (const std::exception& e) {
      v.require(false, "alpha1=" + fmt(alpha1) + " threw: " + e.what());
    }
  }
  v.require(seconds_since(t0) < kSeconds, "time=" + fmt(seconds_since(t0)) + "s");
  return v;
}

Outcome band_without_mode_criterion(const CondensateReport& r) {
  constexpr double kExcess = 0.1, kModeFraction = 1e-3, kBandTolerance = 0.05;
  Outcome v;
  v.require(r.verdict == qavg::Verdict::type_iii, "report available");
  v.require(r.max_mode_density < kModeFraction * kExcess,
            "max single-mode=" + fmt(r.max_mode_density));
  v.require(relative(r.band_density, kExcess) <= kBandTolerance,
            "band=" + fmt(r.band_density));
  return v;
}

// 5. Small-source law of mu on the lemma schedule of the tool.
Outcome small_source_criterion() {
  constexpr double kExcess = 0.25, kRatioCeiling = 0.1, kSlopeTolerance = 0.02;
  Outcome v;
  LimitSchedule s;
  s.volumes = geometric_schedule(1e6, 10.0, 7);
  for (int m = 0; m <= 6; ++m) s.amplitudes.push_back(1e-2 * std::pow(10.0, -0.5 * m));
  const auto r = lemma41_check(1.0, critical_density(1.0) + kExcess, s);
  bool positive = true, decreasing = true;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    positive = positive && r.rows[i].correction_ratio > 0.0;
    if (i) decreasing = decreasing && r.rows[i].correction_ratio < r.rows[i - 1].correction_ratio;
  }
  const auto& last = r.rows.back();
  v.require(positive, "correction/lambda > 0");
  v.require(decreasing, "monotone decrease");
  v.require(last.correction_ratio < kRatioCeiling,
            "first=" + fmt(r.rows.front().correction_ratio) + " last=" + fmt(last.correction_ratio));
  v.require(relative(last.mu_infinite / last.amplitude, -2.0) <= kSlopeTolerance,
            "mu_inf/lambda=" + fmt(last.mu_infinite / last.amplitude));
  return v;
}

// 6. Quasi-average equivalences at phases 0 and pi/3.
Outcome quasi_average_criterion() {
  constexpr double kExcess = 0.25, kRel = 0.01, kPhase = 1e-3, kOffmode = 1e-4, kContrast = 1e-3;
  Outcome v;
  const double rho = critical_density(1.0) + kExcess;
  for (double phi : {0.0, kPi / 3.0}) {
    const auto r = run_quasi_average(0.6, 1.0, rho, phi, LimitSchedule::standard());
    const double modulus = std::abs(r.ssb_parameter);
    const double phase_error = std::abs(std::remainder(std::arg(r.ssb_parameter) - phi, 2 * kPi));
    const std::string tag = "phi=" + fmt(phi) + ": ";
    v.require(relative(modulus, 0.5) <= kRel, tag + "|ssb|=" + fmt(modulus));
    v.require(phase_error <= kPhase, tag + "arg err=" + fmt(phase_error));
    v.require(relative(r.bec_density, kExcess) <= kRel, tag + "bec=" + fmt(r.bec_density));
    v.require(r.offmode_max < kOffmode, tag + "offmode=" + fmt(r.offmode_max));
    v.require(relative(modulus * modulus, r.bec_density) <= kRel,
              tag + "|ssb|^2-bec rel=" + fmt(relative(modulus * modulus, r.bec_density)));
    v.require(r.unsourced_selected_density < kContrast,
              tag + "unsourced=" + fmt(r.unsourced_selected_density));
  }
  return v;
}

// 7. Source derivative of the pressure and convexity in the amplitude.
Outcome pressure_criterion() {
  constexpr double kTolerance = 1e-6, kConvexFloor = -1e-10;
  constexpr int kPoints = 50;
  Outcome v;
  const auto geom = BoxGeometry::elongated(1e4, 1.0 / 3.0);
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, lowest = 1e300;
  for (int i = 0; i < kPoints; ++i) {
    const double mu = -std::pow(10.0, -3.0 + 3.0 * u(rng));
    const double amplitude = std::pow(10.0, -3.0 + 2.0 * u(rng));
    const SourceField src(amplitude, 2.0 * kPi * u(rng));
    const auto analytic = pressure_wirtinger(mu, src);
    const auto numeric = pressure_wirtinger_numeric(geom, 1.0, mu, src, 1e-4 * amplitude);
    worst = std::max(worst, std::abs(numeric - analytic) / std::abs(analytic));
    const double h = 1e-2 * amplitude;
    lowest = std::min(lowest, pressure(geom, 1.0, mu, SourceField(amplitude + h, src.phase)) -
                                  2.0 * pressure(geom, 1.0, mu, src) +
                                  pressure(geom, 1.0, mu, SourceField(amplitude - h, src.phase)));
  }
  v.require(worst <= kTolerance, "max rel.err=" + fmt(worst));
  v.require(lowest >= kConvexFloor, "min second difference=" + fmt(lowest));
  return v;
}

// 8. Ferromagnet exact diagonalization.
Outcome spin_criterion() {
  constexpr double kOracle = 1e-12, kZero = 1e-13, kRotation = 1e-10, kSeconds = 120.0;
  Outcome v;
  const auto t0 = std::chrono::steady_clock::now();

  // Two sites: triplet at -1 - 2 B m, singlet at +3.
  const double beta = 1.0, b = 0.3;
  const double up = std::exp(beta * (1 + 2 * b)), flat = std::exp(beta),
               down = std::exp(beta * (1 - 2 * b)), singlet = std::exp(-3 * beta);
  const double m_oracle = (up - down) / (up + flat + down + singlet);
  const double odlro_oracle = 6.0 * flat / (3.0 * flat + singlet);
  const auto pair = SpinLattice::chain(2);
  const auto state = thermal_expectations(pair, FieldSpec(b, {0.0, 0.0, 1.0}), beta);
  const double pair_error =
      std::max({std::abs(state.magnetization[2] - m_oracle), std::abs(state.magnetization[0]),
                std::abs(state.magnetization[1]), std::abs(odlro_moment(pair, beta) - odlro_oracle)});
  v.require(pair_error <= kOracle, "N=2 err=" + fmt(pair_error));

  double zero_field = 0.0;
  for (int n = 2; n <= 10; ++n) {
    const auto s = thermal_expectations(SpinLattice::chain(n), FieldSpec(), 2.0);
    for (double m : s.magnetization) zero_field = std::max(zero_field, std::abs(m));
  }
  v.require(zero_field <= kZero, "B=0 max|m|=" + fmt(zero_field));

  const Vec3 axis{1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
  const auto rot = rotation_covariance_check(SpinLattice::chain(6), 1.0, 0.2, {0.0, 0.0, 1.0},
                                             rotation_matrix(axis, 0.9), kRotation);
  v.require(rot.max_deviation <= kRotation, "rotation dev=" + fmt(rot.max_deviation));

  double previous = -1.0;
  bool monotone = true;
  for (int n : {2, 4, 6, 8, 10}) {
    const double mz =
        thermal_expectations(SpinLattice::chain(n), FieldSpec(0.1, {0.0, 0.0, 1.0}), 2.0)
            .magnetization[2];
    monotone = monotone && mz > previous;
    previous = mz;
  }
  v.require(monotone, "m_z increasing in N at B=0.1");
  v.require(seconds_since(t0) < kSeconds, "time=" + fmt(seconds_since(t0)) + "s");
  return v;
}

// 9. Diagonal interacting gas.
Outcome interacting_criterion() {
  constexpr double kWeak = 1e-6, kResidual = 1e-10, kWeakCoupling = 1e-12;
  Outcome v;
  const double rho = critical_density(1.0) + 0.1;
  const auto volumes = geometric_schedule(1e4, 4.0, 6);
  try {
    const auto r = classify_interacting(1.0, 0.6, 1.0, rho, volumes, {});
    v.require(r.verdict == qavg::Verdict::type_iii,
              std::string(to_string(r.verdict)) + " band=" + fmt(r.band_density));
    const DiagonalModel model(1.0, BoxGeometry::elongated(volumes.back(), 0.6));
    const double residual = relative(interacting_density(model, 1.0, r.mu_solution), rho);
    v.require(residual < kResidual, "residual=" + fmt(residual));
  } catch (const std::exception& e) {
    v.require(false, std::string("threw: ") + e.what());
  }
  double weak = 0.0;
  for (double e : {0.0, 1e-3, 0.1, 1.0}) {
    for (double mu : {-1e-3, -0.1}) {
      const double ideal = bose_occupation(1.0, e, mu);
      const double n = mode_statistics(e, 1.0, mu, kWeakCoupling, 1e3).mean_occupation;
      weak = std::max(weak, std::abs(n - ideal) / std::max(ideal, 1.0));
    }
  }
  v.require(weak <= kWeak, "a->0 occupation err=" + fmt(weak));
  return v;
}

// 10. Two runs of the quasi-average command give identical bytes.
Outcome determinism_criterion(const std::string& tool) {
  Outcome v;
  const std::string args = "quasi-average --alpha1 0.6 --beta 1 --rho " +
                           fmt(critical_density(1.0) + 0.25) + " --phi 0 --out ";
  const int a = run_tool(tool, args + "acc_c10a");
  const int b = run_tool(tool, args + "acc_c10b");
  v.require(a == 0 && b == 0, "exit statuses");
  const auto ja = slurp("acc_c10a/quasi-average.json"), jb = slurp("acc_c10b/quasi-average.json");
  v.require(!ja.empty() && ja == jb, "JSON bytes equal (" + std::to_string(ja.size()) + " B)");
  v.require(slurp("acc_c10a/quasi-average_trace.csv") == slurp("acc_c10b/quasi-average_trace.csv"),
            "CSV bytes equal");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-qavg>\n");
    return 2;
  }
  const std::string tool = argv[1];
  CondensateReport type_iii;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"critical density", [&] { return critical_density_criterion(tool); }},
      {"type-I chemical potential law", mu_law_criterion},
      {"type I/II/III classification", [&] { return classification_criterion(type_iii); }},
      {"band condensate without a macroscopic mode",
       [&] { return band_without_mode_criterion(type_iii); }},
      {"small-source chemical potential law", small_source_criterion},
      {"quasi-average equivalences", quasi_average_criterion},
      {"pressure source derivative and convexity", pressure_criterion},
      {"ferromagnet exact diagonalization", spin_criterion},
      {"diagonal interacting gas", interacting_criterion},
      {"determinism of reports", [&] { return determinism_criterion(tool); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.require(false, std::string("threw: ") + e.what());
    }
    if (!v.passed) ++failures;
    std::printf("%s %2zu %s [%.1fs] %s\n", v.passed ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), seconds_since(t0), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

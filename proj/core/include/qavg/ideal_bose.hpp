#pragma once

// Grand-canonical perfect Bose gas in an anisotropic periodic box: condensate
// equation, critical density, chemical-potential solver, per-mode occupations
// and the type I / II / III condensation classifier.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qavg/errors.hpp"
#include "qavg/extrapolation.hpp"
#include "qavg/mode_grid.hpp"

namespace qavg {

struct ChemicalPotential {
  double value = 0.0;
};
struct Density {
  double value = 0.0;
};

/// One grand-canonical evaluation point: inverse temperature plus either a
/// chemical potential or a target density.
struct ThermoPoint {
  ThermoPoint(double beta, ChemicalPotential mu);
  ThermoPoint(double beta, Density rho);

  double beta;
  std::variant<ChemicalPotential, Density> target;
};

/// Relative accuracy demanded of every density-equation root.
inline constexpr double kDensityRootTolerance = 1e-12;

/// zeta(3/2) / (4 pi beta)^(3/2): the saturation density at mu = 0-.
double critical_density(double beta);

/// Infinite-volume density (4 pi beta)^(-3/2) g_{3/2}(exp(beta mu)), mu <= 0.
double infinite_volume_density(double beta, double mu);

/// Bose function g_{3/2}(exp(-x)) for x >= 0.
double bose_g32(double x);

/// (1/V) sum_k (exp(beta (e_k - mu)) - 1)^-1 over the whole dual lattice.
double finite_volume_density(const BoxGeometry& geom, double beta, double mu);

/// Unique mu < 0 with finite_volume_density = rho to kDensityRootTolerance.
double solve_mu(const BoxGeometry& geom, double beta, double rho);

/// Chemical potential of a ThermoPoint: the given mu, or solve_mu's root.
double resolve_mu(const BoxGeometry& geom, const ThermoPoint& point);

/// Infinite-volume root of infinite_volume_density(beta, mu) = rho; zero at
/// and above the critical density.
double solve_mu_infinite(double beta, double rho);

struct ModeDensity {
  Mode mode;
  double density = 0.0;
};

/// The `top` lowest-energy modes with their densities, sorted by density
/// (descending; ties keep energy order).
std::vector<ModeDensity> mode_occupations(const BoxGeometry& geom, double beta, double mu,
                                          std::size_t top);

/// (1/V) sum over modes with |k| <= radius.
double band_density(const BoxGeometry& geom, double beta, double mu, double radius);

enum class Verdict { none, type_i, type_ii, type_iii };
std::string_view to_string(Verdict verdict);

struct ClassifierOptions {
  /// "Macroscopic" means at least this fraction of rho - rho_c after extrapolation.
  double macroscopic_fraction = 1e-3;
  /// Relative tolerance for "carries the whole condensate".
  double type_tolerance = 0.05;
  /// Modes whose densities are tracked across the volume schedule.
  std::vector<ModeIndex> tracked_modes{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {0, 1, 0}};
  /// Band radii eta0 / 2^m, m = 0 .. band_radius_count - 1.
  double band_radius_start = 1.0;
  std::size_t band_radius_count = 4;
  /// Volume extrapolation of single-mode densities.
  LimitOptions mode_fit;
  /// Volume and radius extrapolation of band densities. Band sums jump as
  /// transverse rows enter the ball, so very slow exponents are excluded.
  FitOptions band_fit{0.2, 3.0};
  /// Number of lowest modes listed in the report at the largest volume.
  std::size_t report_modes = 10;
};

struct VolumeSample {
  double volume = 0.0;
  double mu = 0.0;
  double total_density = 0.0;
  std::vector<double> tracked_densities;  // parallel to ClassifierOptions::tracked_modes
  std::vector<double> band_densities;     // parallel to band radii
};

struct TrackedModeLimit {
  ModeIndex index{};
  double limit = 0.0;
  double log_log_slope = 0.0;
  bool macroscopic = false;
  bool vanishing = false;  // negative log-log slope and a sub-threshold limit
  PowerLawFit fit;
};

struct BandLimit {
  double radius = 0.0;
  double limit = 0.0;
  PowerLawFit fit;
};

struct CondensateReport {
  double alpha1 = 0.0;
  double beta = 0.0;
  double mu_solution = 0.0;  // at the largest scheduled volume
  double total_density = 0.0;
  double critical_density = 0.0;
  double condensate_density = 0.0;
  std::vector<ModeDensity> per_mode;  // at the largest scheduled volume
  double band_density = 0.0;          // double limit radius -> 0 after V -> infinity
  double max_mode_density = 0.0;      // largest extrapolated single-mode density
  Verdict verdict = Verdict::none;

  // diagnostics
  ClassifierOptions options;
  std::vector<VolumeSample> samples;
  std::vector<TrackedModeLimit> mode_limits;
  std::vector<BandLimit> band_limits;
  PowerLawFit band_radius_fit;
  std::string rationale;
};

/// Raised when the extrapolated data fit none of the condensation types;
/// carries the full report for inspection.
class ClassificationError : public Error {
 public:
  ClassificationError(const std::string& what, CondensateReport report)
      : Error(what), report_(std::move(report)) {}
  const CondensateReport& report() const noexcept { return report_; }

 private:
  CondensateReport report_;
};

/// Per-volume occupations for a model in the elongated box geometry. Shared by
/// the ideal and the interacting classifiers.
struct OccupationModel {
  /// Solves the density equation at this volume.
  std::function<double(const BoxGeometry&, double rho)> solve;
  /// Mean occupation number of a mode of the given energy.
  std::function<double(const BoxGeometry&, double mu, double energy)> occupation;
  /// Energy below which occupations may vary too fast for row quadrature.
  std::function<double(const BoxGeometry&, double mu)> rough_below;
};

/// Builds the per-volume table and extrapolated limits common to every model;
/// the verdict is left unset.
CondensateReport sample_condensation(double alpha1, double beta, double rho,
                                     std::span<const double> volumes,
                                     const OccupationModel& model,
                                     const ClassifierOptions& options);

/// Assigns the verdict from the extrapolated limits relative to `excess`
/// (the density that must condense). Throws ClassificationError when no type
/// fits.
void assign_verdict(CondensateReport& report, double excess);

CondensateReport classify_condensation(double alpha1, double beta, double rho,
                                       std::span<const double> volumes,
                                       const ClassifierOptions& options = {});

/// Geometric schedule start * ratio^m, m = 0 .. count - 1.
std::vector<double> geometric_schedule(double start, double ratio, std::size_t count);

}  // namespace qavg

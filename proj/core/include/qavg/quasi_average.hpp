#pragma once

// Quasi-averages for the perfect Bose gas with a single-mode
// gauge-symmetry-breaking source sqrt(V) (conj(lambda) b_q + lambda b_q^*).
// The shift b_q -> b_q - lambda sqrt(V) / (e_q - mu) diagonalizes the
// sourced Hamiltonian, so every quantity here is a lattice sum plus an
// explicit source term.

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qavg/extrapolation.hpp"
#include "qavg/ideal_bose.hpp"
#include "qavg/mode_grid.hpp"

namespace qavg {

struct SourceField {
  SourceField() = default;
  /// Throws DomainError for negative or non-finite amplitude; the phase is
  /// reduced to [0, 2 pi).
  SourceField(double amplitude, double phase, ModeIndex mode_index = {0, 0, 0});
  static SourceField from_complex(std::complex<double> lambda, ModeIndex mode_index = {0, 0, 0});

  double amplitude = 0.0;
  double phase = 0.0;
  ModeIndex mode_index{0, 0, 0};
  /// When set, the source sits on the lattice mode nearest this momentum at
  /// each volume instead of on the fixed index, so the selected energy stays
  /// away from zero as the volume grows.
  std::optional<std::array<double, 3>> fixed_momentum;

  std::complex<double> value() const { return std::polar(amplitude, phase); }
};

/// Index of the mode carrying the source in this geometry.
ModeIndex selected_mode(const BoxGeometry& geom, const SourceField& src);

/// |lambda|^2 / (e_q - mu)^2: the density of the coherent shift.
double source_term(const BoxGeometry& geom, double mu, const SourceField& src);

/// (1/V) n_q(mu) + source_term: mean density of the selected mode.
double selected_mode_density(const BoxGeometry& geom, double beta, double mu,
                             const SourceField& src);

/// Full lattice density plus the source term. Requires mu < 0.
double sourced_density(const BoxGeometry& geom, double beta, double mu, const SourceField& src);

/// Unique mu < 0 with sourced_density = rho to kDensityRootTolerance.
double solve_mu_sourced(const BoxGeometry& geom, double beta, double rho, const SourceField& src);

/// Infinite-volume counterpart: I(beta, mu) + |lambda|^2 / mu^2 = rho for a
/// zero-mode source.
double solve_mu_sourced_infinite(double beta, double rho, double amplitude);

/// Grand-canonical pressure with the source on the zero mode. Requires mu < 0.
double pressure(const BoxGeometry& geom, double beta, double mu, const SourceField& src);

/// Analytic derivative of the pressure with respect to the complex source:
/// -conj(lambda) / mu.
std::complex<double> pressure_wirtinger(double mu, const SourceField& src);

/// 1/2 (d/dRe - i d/dIm) of the pressure by central differences of size
/// `step` in the complex source plane.
std::complex<double> pressure_wirtinger_numeric(const BoxGeometry& geom, double beta, double mu,
                                                const SourceField& src, double step);

struct LimitSchedule {
  enum class FitModel { constant_plus_power };

  /// 1e7 * 10^m for m = 0..6 and 1e-2 * 2^-m for m = 0..7. Smaller boxes
  /// leave the 1/V corrections too large for a three-parameter fit.
  static LimitSchedule standard();
  /// Throws DomainError unless both sequences have >= 4 entries, volumes
  /// strictly increase, amplitudes strictly decrease and stay positive.
  void validate() const;

  std::vector<double> volumes;
  std::vector<double> amplitudes;
  FitModel fit_model = FitModel::constant_plus_power;
  /// Relative residual above which an extrapolation is flagged inconclusive.
  double tolerance = 0.01;
};

struct LemmaRow {
  double amplitude = 0.0;
  double mu_limit = 0.0;       // extrapolated over the volume schedule
  double mu_infinite = 0.0;    // infinite-volume equation, for comparison
  double correction = 0.0;     // mu_limit + amplitude / sqrt(rho - rho_c)
  double correction_ratio = 0.0;
  double mu_ratio = 0.0;       // mu_limit / amplitude
  PowerLawFit fit;
  bool inconclusive = false;
};

struct LemmaReport {
  double beta = 0.0;
  double rho = 0.0;
  double excess = 0.0;
  double alpha1 = 0.0;
  LimitSchedule schedule;
  std::vector<LemmaRow> rows;     // in schedule order (decreasing amplitude)
  bool correction_positive = false;
  bool ratio_decreasing = false;
  bool inconclusive = false;
};

/// Tabulates the volume limit of mu(V, lambda) against the leading law
/// -lambda / sqrt(rho - rho_c) for each amplitude of the schedule.
LemmaReport lemma41_check(double beta, double rho, const LimitSchedule& schedule,
                          double alpha1 = 1.0 / 3.0);

struct TraceRow {
  double volume = 0.0;
  double amplitude = 0.0;
  double mu = 0.0;
  double selected_mode_density = 0.0;
  double source_term = 0.0;
  double band_density = 0.0;
};

struct LimitDiagnostics {
  std::string quantity;
  double amplitude = 0.0;  // 0 for the final amplitude -> 0 fit
  PowerLawFit fit;
  bool inconclusive = false;
};

struct QuasiAverageResult {
  std::complex<double> ssb_parameter;
  double bec_density = 0.0;
  double odlro_density = 0.0;
  double offmode_max = 0.0;
  /// Volume limit of the selected-mode density with the source switched off.
  double unsourced_selected_density = 0.0;
  std::vector<TraceRow> mu_trace;
  std::vector<LimitDiagnostics> convergence;
  bool inconclusive = false;

  double alpha1 = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  double critical_density = 0.0;
  SourceField source;
  LimitSchedule schedule;
  double band_radius = 0.0;
  std::vector<ModeIndex> offmode_indices;
};

struct QuasiAverageOptions {
  /// Radius of the band reported in the trace.
  double band_radius = 1.0 / 32.0;
  /// Non-selected modes tracked for the off-mode bound, as offsets from the
  /// selected index.
  std::vector<ModeIndex> offmode_offsets{{1, 0, 0}, {2, 0, 0}, {0, 1, 0}, {-1, 0, 0}};
};

/// Volume limit first, amplitude limit second, plus the contrast run with the
/// source switched off.
QuasiAverageResult run_quasi_average(double alpha1, double beta, double rho, double phase,
                                     const LimitSchedule& schedule,
                                     const SourceField& selection = {},
                                     const QuasiAverageOptions& options = {});

}  // namespace qavg

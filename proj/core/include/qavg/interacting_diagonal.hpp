#pragma once

// Bose gas with a mode-diagonal repulsion: each mode k carries
//   (e_k - mu) n + (a / 2V) n (n - 1),
// so the modes stay independent but no single mode can hold an extensive
// occupation cheaply. The chemical potential ranges over the whole real line.

#include <cstddef>
#include <span>

#include "qavg/ideal_bose.hpp"
#include "qavg/mode_grid.hpp"

namespace qavg {

struct DiagonalModel {
  /// Throws DomainError unless coupling > 0.
  DiagonalModel(double coupling, BoxGeometry geometry);

  double coupling;
  BoxGeometry geometry;
};

struct ModeStatistics {
  double log_partition = 0.0;
  double mean_occupation = 0.0;
  double occupation_variance = 0.0;
  std::size_t terms = 0;
};

/// Single-mode grand-canonical sums, accumulated outward from the peak of the
/// summand with a log-sum-exp shift. Throws AccuracyError past 1e7 terms.
ModeStatistics mode_statistics(double energy, double beta, double mu, double coupling,
                               double volume);

/// (1/V) sum_k <n_k>.
double interacting_density(const DiagonalModel& model, double beta, double mu);

/// Relative accuracy of the interacting density equation.
inline constexpr double kInteractingRootTolerance = 1e-11;

/// Real mu with interacting_density = rho to kInteractingRootTolerance.
double solve_mu_interacting(const DiagonalModel& model, double beta, double rho);

/// Condensation type of the interacting gas along a volume schedule of
/// elongated boxes. The condensing density is read off the extrapolated band
/// density rather than from a critical-density formula: below
/// `macroscopic_fraction * rho` the verdict is NONE.
CondensateReport classify_interacting(double coupling, double alpha1, double beta, double rho,
                                      std::span<const double> volumes,
                                      const ClassifierOptions& options = {});

}  // namespace qavg

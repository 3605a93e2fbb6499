#pragma once

// Sequence-limit estimation for scheduled double limits. Samples y(x) are taken
// along x -> infinity (volumes, or inverse source amplitudes) and modelled as
//   y(x) = limit + amplitude * x^(-exponent).

#include <cstddef>
#include <span>

namespace qavg {

struct PowerLawFit {
  double limit = 0.0;
  double amplitude = 0.0;
  double exponent = 0.0;
  /// Root-mean-square fit residual.
  double residual = 0.0;
  /// Residual relative to the spread of the data (0 = exact fit).
  double relative_residual = 0.0;
  std::size_t points = 0;
};

struct FitOptions {
  double min_exponent = 0.05;
  double max_exponent = 3.0;
};

/// Least-squares fit of limit + amplitude * x^-p with the exponent found by a
/// log-spaced scan followed by golden-section refinement. Needs >= 3 points
/// with strictly increasing positive x.
PowerLawFit fit_constant_plus_power(std::span<const double> x, std::span<const double> y,
                                    const FitOptions& options = {});

/// Fit of amplitude * x^-p (limit pinned to zero) by linear regression in
/// log-log coordinates. All y must be positive.
PowerLawFit fit_pure_power(std::span<const double> x, std::span<const double> y);

/// Fit of a x^-p + b x^-2p: a power-law decay to zero with its first
/// correction. Needs >= 3 points.
PowerLawFit fit_corrected_power(std::span<const double> x, std::span<const double> y,
                                const FitOptions& options = {});

/// Slope of log y against log x over the samples (y > 0).
double log_log_slope(std::span<const double> x, std::span<const double> y);

struct LimitOptions {
  FitOptions fit;
  /// A clean power-law decay (log-space residual at most this, exponent at
  /// least `pure_power_min_exponent`) is read as a zero limit.
  double pure_power_residual = 0.05;
  double pure_power_min_exponent = 0.1;
};

/// Chooses among the models above. The constant-plus-power fit is kept unless
/// the data decay as a clean power law, or as a corrected power law that fits
/// at least as well; in both cases the limit is zero.
PowerLawFit extrapolate_limit(std::span<const double> x, std::span<const double> y,
                              const LimitOptions& options = {});

}  // namespace qavg

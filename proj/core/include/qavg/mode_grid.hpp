#pragma once

// Dual momentum lattice of a periodic anisotropic box V^a1 x V^a2 x V^a3 and
// grand-canonical Bose sums over it. Units: hbar = 2m = k_B = 1, so a mode
// with integer index n has momentum k_j = 2 pi n_j / V^a_j and energy |k|^2.

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qavg/errors.hpp"

namespace qavg {

using ModeIndex = std::array<std::int64_t, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr std::size_t kModeHardCap = 100'000'000;

class BoxGeometry {
 public:
  /// Throws DomainError unless volume > 0, a1 >= a2 >= a3 > 0 and the
  /// exponents sum to one within 1e-12.
  BoxGeometry(double volume, std::array<double, 3> exponents);

  static BoxGeometry cubic(double volume);
  /// Box with one long axis: a2 = a3 = (1 - a1) / 2. Requires a1 in [1/3, 1).
  static BoxGeometry elongated(double volume, double alpha1);

  double volume() const noexcept { return volume_; }
  const std::array<double, 3>& exponents() const noexcept { return exponents_; }
  std::array<double, 3> side_lengths() const;

 private:
  double volume_;
  std::array<double, 3> exponents_;
};

struct Mode {
  ModeIndex index{};
  std::array<double, 3> momentum{};
  double energy = 0.0;
};

/// Lattice spacings 2 pi / V^a_j of the dual lattice.
std::array<double, 3> spacings(const BoxGeometry& geom);

double mode_energy(const BoxGeometry& geom, const ModeIndex& index);
Mode make_mode(const BoxGeometry& geom, const ModeIndex& index);

/// Upper bound on the number of modes with energy <= cutoff (bounding box count).
double predicted_mode_count(const BoxGeometry& geom, double energy_cutoff);

/// All modes with energy <= cutoff, ascending by energy, ties broken
/// lexicographically on the index. Throws ResourceLimitError above `cap`.
std::vector<Mode> enumerate_modes(const BoxGeometry& geom, double energy_cutoff,
                                  std::size_t cap = kModeHardCap);

/// sum_{n in Z} exp(-t s^2 n^2). Uses the Poisson-resummed form when t s^2 < 1.
double theta_sum(double t, double spacing);
/// The two representations of theta_sum as functions of x = t s^2.
double theta_sum_direct(double x);
double theta_sum_poisson(double x);

enum class SumMethod { automatic, direct, series };

struct LatticeSumOptions {
  SumMethod method = SumMethod::automatic;
  /// Direct enumeration is used while the predicted mode count stays below this.
  double direct_mode_limit = 1e6;
  /// Series stops once a rigorous bound on the remainder drops below this
  /// fraction of the accumulated value.
  double series_relative_tolerance = 1e-15;
  /// Direct sums stop along an axis once a mode contributes less than this
  /// fraction of the accumulated value.
  double direct_relative_cutoff = 1e-18;
  std::size_t series_iteration_cap = 100'000'000;
};

/// (1/V) sum over non-excluded modes of 1 / (exp(beta (e_k - mu)) - 1).
/// Throws DomainError when mu is not below every non-excluded energy.
double bose_lattice_sum(const BoxGeometry& geom, double beta, double mu,
                        std::span<const ModeIndex> excluded = {},
                        const LatticeSumOptions& options = {});

/// (1/V) sum over non-excluded modes of -ln(1 - exp(-beta (e_k - mu))).
double bose_log_lattice_sum(const BoxGeometry& geom, double beta, double mu,
                            std::span<const ModeIndex> excluded = {},
                            const LatticeSumOptions& options = {});

/// Lowest energy among modes not listed in `excluded`.
double lowest_allowed_energy(const BoxGeometry& geom, std::span<const ModeIndex> excluded);

inline double bose_occupation(double beta, double energy, double mu) {
  return 1.0 / std::expm1(beta * (energy - mu));
}

namespace detail {

/// Number of excluded modes in each sign orbit {(+-a1, +-a2, +-a3)}, keyed by
/// the absolute index.
using ExclusionCounts = std::map<ModeIndex, int>;
ExclusionCounts exclusion_counts(std::span<const ModeIndex> excluded);

struct NeumaierSum {
  double sum = 0.0;
  double compensation = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      compensation += (sum - t) + x;
    } else {
      compensation += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + compensation; }
};

struct ModeSumLimits {
  double energy_ceiling = std::numeric_limits<double>::infinity();
  double relative_cutoff = 1e-18;
  std::size_t max_modes = kModeHardCap;
};

/// Sums term(energy) over all modes, walking each axis outward from zero.
/// `term` must be non-increasing in energy; an axis walk stops when the first
/// mode of a branch falls below relative_cutoff times the running sum. The
/// traversal order is fixed, so results are bitwise reproducible.
template <class Term>
double sum_over_modes(const BoxGeometry& geom, Term&& term, const ModeSumLimits& limits,
                      const ExclusionCounts& excluded = {}) {
  const auto s = spacings(geom);
  const std::array<double, 3> s2{s[0] * s[0], s[1] * s[1], s[2] * s[2]};
  NeumaierSum acc;
  std::size_t visited = 0;

  // Terms at or below mu (reachable only through excluded modes) are
  // negative or infinite and never end a walk.
  auto below_cutoff = [&](double t) {
    return std::isfinite(t) && t >= 0.0 && t <= limits.relative_cutoff * acc.value();
  };
  auto excluded_in = [&](std::int64_t a1, std::int64_t a2, std::int64_t a3) {
    if (excluded.empty()) return 0;
    const auto it = excluded.find(ModeIndex{a1, a2, a3});
    return it == excluded.end() ? 0 : it->second;
  };

  for (std::int64_t a1 = 0;; ++a1) {
    const double e1 = s2[0] * static_cast<double>(a1 * a1);
    if (e1 > limits.energy_ceiling) break;
    if (a1 > 0 && below_cutoff(term(e1))) break;
    for (std::int64_t a2 = 0;; ++a2) {
      const double e12 = e1 + s2[1] * static_cast<double>(a2 * a2);
      if (e12 > limits.energy_ceiling) break;
      if (a2 > 0 && below_cutoff(term(e12))) break;
      for (std::int64_t a3 = 0;; ++a3) {
        const double e = e12 + s2[2] * static_cast<double>(a3 * a3);
        if (e > limits.energy_ceiling) break;
        const int orbit = (a1 ? 2 : 1) * (a2 ? 2 : 1) * (a3 ? 2 : 1);
        const int multiplicity = orbit - excluded_in(a1, a2, a3);
        if (multiplicity == 0) continue;
        const double t = term(e);
        if (a3 > 0 && below_cutoff(t)) break;
        acc.add(multiplicity * t);
        visited += static_cast<std::size_t>(orbit);
        if (visited > limits.max_modes) {
          throw ResourceLimitError("mode sum exceeded the hard cap of " +
                                   std::to_string(limits.max_modes) + " modes");
        }
      }
    }
  }
  return acc.value();
}

/// Sums term(energy) over every mode with energy <= energy_ceiling. Modes are
/// grouped into rows along the long axis; a row longer than
/// `direct_row_length` is summed directly near its centre and by the
/// midpoint Euler-Maclaurin formula beyond, so the cost grows with the
/// number of rows rather than the number of modes. `term` must be smooth in
/// the energy above `rough_below`; modes below it are summed directly.
template <class Term>
double band_sum(const BoxGeometry& geom, Term&& term, double energy_ceiling, double rough_below = 0.0,
                std::int64_t direct_row_length = 4096) {
  const auto s = spacings(geom);
  const std::array<double, 3> s2{s[0] * s[0], s[1] * s[1], s[2] * s[2]};
  const std::int64_t head = direct_row_length / 2;
  NeumaierSum acc;

  auto row_sum = [&](double e23) {
    const double room = energy_ceiling - e23;
    auto k = static_cast<std::int64_t>(std::floor(std::sqrt(room / s2[0])));
    while (s2[0] * static_cast<double>((k + 1) * (k + 1)) + e23 <= energy_ceiling) ++k;
    while (k > 0 && s2[0] * static_cast<double>(k * k) + e23 > energy_ceiling) --k;
    auto g = [&](double x) { return term(s2[0] * x * x + e23); };
    NeumaierSum row;
    std::int64_t direct_end = k <= direct_row_length ? k : head;
    if (direct_end < k && rough_below > e23) {
      const auto rough = static_cast<std::int64_t>(std::ceil(std::sqrt((rough_below - e23) / s2[0])));
      direct_end = std::min(k, std::max(direct_end, rough + head));
    }
    for (std::int64_t n = direct_end; n >= 1; --n) row.add(g(static_cast<double>(n)));
    if (direct_end < k) {
      // sum_{n=a}^{b} g(n) = int_{a-1/2}^{b+1/2} g - [g'(b+1/2) - g'(a-1/2)] / 24 + O(g''')
      const double lo = static_cast<double>(direct_end) + 0.5;
      const double hi = static_cast<double>(k) + 0.5;
      auto slope = [&](double x) {
        return (g(x - 2.0) - 8.0 * g(x - 1.0) + 8.0 * g(x + 1.0) - g(x + 2.0)) / 12.0;
      };
      const double integral =
          boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, lo, hi, 20, 1e-14);
      row.add(integral - (slope(hi) - slope(lo)) / 24.0);
    }
    return g(0.0) + 2.0 * row.value();
  };

  for (std::int64_t a2 = 0;; ++a2) {
    const double e2 = s2[1] * static_cast<double>(a2 * a2);
    if (e2 > energy_ceiling) break;
    for (std::int64_t a3 = 0;; ++a3) {
      const double e23 = e2 + s2[2] * static_cast<double>(a3 * a3);
      if (e23 > energy_ceiling) break;
      const int multiplicity = (a2 ? 2 : 1) * (a3 ? 2 : 1);
      acc.add(multiplicity * row_sum(e23));
    }
  }
  return acc.value();
}

}  // namespace detail
}  // namespace qavg

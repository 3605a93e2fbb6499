#include "qavg/mode_grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qavg {

namespace {

// exp(-45) ~ 3e-20: below the double floor relative to any O(1) sum.
constexpr double kDecayExponent = 45.0;
// Above this many Matsubara terms the series switches to a mode-sum tail.
constexpr double kSeriesTermBudget = 262144.0;
constexpr double kTailModeLimit = 2e6;
constexpr std::size_t kMaxSwitchIndex = std::size_t{1} << 26;

}  // namespace

BoxGeometry::BoxGeometry(double volume, std::array<double, 3> exponents)
    : volume_(volume), exponents_(exponents) {
  if (!(volume > 0.0) || !std::isfinite(volume)) {
    throw DomainError("box volume must be positive and finite");
  }
  const auto [a1, a2, a3] = exponents;
  if (!(a1 >= a2 && a2 >= a3 && a3 > 0.0)) {
    std::ostringstream msg;
    msg << "box exponents must satisfy a1 >= a2 >= a3 > 0, got (" << a1 << ", " << a2 << ", "
        << a3 << ")";
    throw DomainError(msg.str());
  }
  if (std::abs(a1 + a2 + a3 - 1.0) > 1e-12) {
    throw DomainError("box exponents must sum to 1");
  }
}

BoxGeometry BoxGeometry::cubic(double volume) {
  return BoxGeometry(volume, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
}

BoxGeometry BoxGeometry::elongated(double volume, double alpha1) {
  if (!(alpha1 >= 1.0 / 3.0 - 1e-15 && alpha1 < 1.0)) {
    throw DomainError("alpha1 must lie in [1/3, 1)");
  }
  const double rest = 0.5 * (1.0 - alpha1);
  // Keep exact ordering when alpha1 is 1/3 up to rounding.
  const double a1 = std::max(alpha1, rest);
  return BoxGeometry(volume, {a1, rest, 1.0 - a1 - rest});
}

std::array<double, 3> BoxGeometry::side_lengths() const {
  return {std::pow(volume_, exponents_[0]), std::pow(volume_, exponents_[1]),
          std::pow(volume_, exponents_[2])};
}

std::array<double, 3> spacings(const BoxGeometry& geom) {
  const auto sides = geom.side_lengths();
  return {2.0 * kPi / sides[0], 2.0 * kPi / sides[1], 2.0 * kPi / sides[2]};
}

double mode_energy(const BoxGeometry& geom, const ModeIndex& index) {
  const auto s = spacings(geom);
  double e = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double k = s[j] * static_cast<double>(index[j]);
    e += k * k;
  }
  return e;
}

Mode make_mode(const BoxGeometry& geom, const ModeIndex& index) {
  const auto s = spacings(geom);
  Mode mode;
  mode.index = index;
  for (int j = 0; j < 3; ++j) {
    mode.momentum[j] = s[j] * static_cast<double>(index[j]);
  }
  mode.energy = mode_energy(geom, index);
  return mode;
}

double predicted_mode_count(const BoxGeometry& geom, double energy_cutoff) {
  if (energy_cutoff < 0.0) return 0.0;
  const auto s = spacings(geom);
  const double root = std::sqrt(energy_cutoff);
  double count = 1.0;
  for (double sj : s) count *= 2.0 * std::floor(root / sj) + 1.0;
  return count;
}

std::vector<Mode> enumerate_modes(const BoxGeometry& geom, double energy_cutoff,
                                  std::size_t cap) {
  if (!(energy_cutoff > 0.0)) throw DomainError("energy cutoff must be positive");

  const auto s = spacings(geom);
  const double root = std::sqrt(energy_cutoff);
  std::array<std::int64_t, 3> extent{};
  for (int j = 0; j < 3; ++j) {
    const double e = std::floor(root / s[j]);
    if (e > 1e12) throw ResourceLimitError("energy cutoff spans too many modes along an axis");
    extent[j] = static_cast<std::int64_t>(e);
  }

  // Ellipsoid volume estimate guards the exact count against pathological cutoffs.
  const double ellipsoid = 4.0 / 3.0 * kPi * root * root * root / (s[0] * s[1] * s[2]);
  if (ellipsoid > 2.0 * static_cast<double>(cap)) {
    throw ResourceLimitError("enumeration would exceed the mode cap of " + std::to_string(cap));
  }

  auto sq = [](double x) { return x * x; };
  std::vector<Mode> modes;
  for (std::int64_t n1 = -extent[0]; n1 <= extent[0]; ++n1) {
    const double e1 = sq(s[0] * static_cast<double>(n1));
    for (std::int64_t n2 = -extent[1]; n2 <= extent[1]; ++n2) {
      const double e12 = e1 + sq(s[1] * static_cast<double>(n2));
      if (e12 > energy_cutoff) continue;
      for (std::int64_t n3 = -extent[2]; n3 <= extent[2]; ++n3) {
        const ModeIndex index{n1, n2, n3};
        const double e = mode_energy(geom, index);
        if (e > energy_cutoff) continue;
        if (modes.size() >= cap) {
          throw ResourceLimitError("enumeration exceeded the mode cap of " + std::to_string(cap));
        }
        modes.push_back(make_mode(geom, index));
      }
    }
  }

  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.index < b.index;
  });
  return modes;
}

double theta_sum_direct(double x) {
  double sum = 1.0;
  for (std::int64_t n = 1;; ++n) {
    const double term = 2.0 * std::exp(-x * static_cast<double>(n * n));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

double theta_sum_poisson(double x) {
  const double q = kPi * kPi / x;
  double sum = 1.0;
  for (std::int64_t n = 1;; ++n) {
    const double term = 2.0 * std::exp(-q * static_cast<double>(n * n));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return std::sqrt(kPi / x) * sum;
}

double theta_sum(double t, double spacing) {
  const double x = t * spacing * spacing;
  return x < 1.0 ? theta_sum_poisson(x) : theta_sum_direct(x);
}

namespace detail {

ExclusionCounts exclusion_counts(std::span<const ModeIndex> excluded) {
  std::vector<ModeIndex> unique(excluded.begin(), excluded.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  ExclusionCounts counts;
  for (const auto& n : unique) {
    ++counts[ModeIndex{std::abs(n[0]), std::abs(n[1]), std::abs(n[2])}];
  }
  return counts;
}

}  // namespace detail

double lowest_allowed_energy(const BoxGeometry& geom, std::span<const ModeIndex> excluded) {
  const auto counts = detail::exclusion_counts(excluded);
  if (!counts.contains(ModeIndex{0, 0, 0})) return 0.0;
  const auto s = spacings(geom);
  double cutoff = *std::min_element(s.begin(), s.end());
  cutoff *= cutoff;
  for (;;) {
    const auto modes = enumerate_modes(geom, cutoff * (1.0 + 1e-12));
    for (const auto& m : modes) {
      if (std::find(excluded.begin(), excluded.end(), m.index) == excluded.end()) {
        return m.energy;
      }
    }
    cutoff *= 4.0;
  }
}

namespace {

enum class SumKind { occupation, log_partition };

double mode_term(SumKind kind, double beta, double energy, double mu) {
  const double x = beta * (energy - mu);
  return kind == SumKind::occupation ? 1.0 / std::expm1(x) : -std::log1p(-std::exp(-x));
}

double direct_sum(SumKind kind, const BoxGeometry& geom, double beta, double mu,
                  const detail::ExclusionCounts& counts, const LatticeSumOptions& options) {
  detail::ModeSumLimits limits;
  limits.relative_cutoff = options.direct_relative_cutoff;
  const double total = detail::sum_over_modes(
      geom, [&](double e) { return mode_term(kind, beta, e, mu); }, limits, counts);
  return total / geom.volume();
}

// Chooses the Matsubara index at which the series hands over to a mode sum,
// or 0 when the series alone is affordable. Among power-of-two candidates the
// one with the smallest combined series and tail cost wins.
std::size_t tail_switch_index(SumKind kind, const BoxGeometry& geom, double beta, double mu) {
  if (kind != SumKind::occupation) return 0;
  const double needed = kDecayExponent / (beta * -mu);
  if (needed <= kSeriesTermBudget) return 0;
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t m = 256; m <= kMaxSwitchIndex; m *= 2) {
    const double ceiling = kDecayExponent / (static_cast<double>(m) * beta);
    const double tail_modes = predicted_mode_count(geom, ceiling);
    if (tail_modes > kTailModeLimit) continue;
    // A series term costs three theta evaluations, roughly three mode terms.
    const double cost = 3.0 * static_cast<double>(m) + tail_modes;
    if (cost < best_cost) {
      best_cost = cost;
      best = m;
    }
  }
  return best;
}

double series_sum(SumKind kind, const BoxGeometry& geom, double beta, double mu,
                  std::span<const ModeIndex> excluded, const detail::ExclusionCounts& counts,
                  const LatticeSumOptions& options) {
  const auto s = spacings(geom);
  std::vector<double> excluded_energies;
  {
    auto unique = std::vector<ModeIndex>(excluded.begin(), excluded.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (const auto& n : unique) excluded_energies.push_back(mode_energy(geom, n));
  }

  const std::size_t switch_at = tail_switch_index(kind, geom, beta, mu);
  // Pi_j theta(m beta; s_j) is non-increasing in m, so the remainder after
  // term m is bounded by term_m * r / (1 - r) with r = exp(beta mu).
  const double ratio_bound = 1.0 / std::expm1(-beta * mu);

  detail::NeumaierSum acc;
  for (std::size_t m = 1;; ++m) {
    if (switch_at != 0 && m == switch_at) break;
    if (m > options.series_iteration_cap) {
      throw AccuracyError("Matsubara series did not converge within " +
                          std::to_string(options.series_iteration_cap) + " terms");
    }
    const double t = static_cast<double>(m) * beta;
    const double weight = kind == SumKind::occupation ? 1.0 : 1.0 / static_cast<double>(m);
    const double full =
        weight * std::exp(t * mu) * theta_sum(t, s[0]) * theta_sum(t, s[1]) * theta_sum(t, s[2]);
    double term = full;
    for (double e : excluded_energies) term -= weight * std::exp(-t * (e - mu));
    acc.add(term);
    if (switch_at == 0 && full * ratio_bound <= options.series_relative_tolerance * acc.value()) {
      break;
    }
  }
  double total = acc.value();

  if (switch_at != 0) {
    // sum_{m >= M} exp(-m beta (e - mu)) = exp(-M beta (e - mu)) / (1 - exp(-beta (e - mu)))
    const double big_m = static_cast<double>(switch_at);
    detail::ModeSumLimits limits;
    limits.relative_cutoff = 1e-18;
    const double tail = detail::sum_over_modes(
        geom,
        [&](double e) {
          const double x = beta * (e - mu);
          return std::exp(-big_m * x) / -std::expm1(-x);
        },
        limits, counts);
    total += tail;
  }
  return total / geom.volume();
}

double lattice_sum(SumKind kind, const BoxGeometry& geom, double beta, double mu,
                   std::span<const ModeIndex> excluded, const LatticeSumOptions& options) {
  if (!(beta > 0.0)) throw DomainError("inverse temperature must be positive");
  if (std::isnan(mu)) throw DomainError("chemical potential is NaN");
  const double floor_energy = lowest_allowed_energy(geom, excluded);
  if (!(mu < floor_energy)) {
    std::ostringstream msg;
    msg << "chemical potential " << mu << " is not below the lowest allowed energy "
        << floor_energy;
    throw DomainError(msg.str());
  }

  const auto counts = detail::exclusion_counts(excluded);
  SumMethod method = options.method;
  if (method == SumMethod::automatic) {
    const double ceiling = std::max(mu, 0.0) + kDecayExponent / beta;
    method = predicted_mode_count(geom, ceiling) > options.direct_mode_limit ? SumMethod::series
                                                                              : SumMethod::direct;
  }
  if (method == SumMethod::series && !(mu < 0.0)) {
    // The theta factorization includes the zero mode; with mu >= 0 only the
    // direct walk is valid.
    method = SumMethod::direct;
  }
  return method == SumMethod::series ? series_sum(kind, geom, beta, mu, excluded, counts, options)
                                     : direct_sum(kind, geom, beta, mu, counts, options);
}

}  // namespace

double bose_lattice_sum(const BoxGeometry& geom, double beta, double mu,
                        std::span<const ModeIndex> excluded, const LatticeSumOptions& options) {
  return lattice_sum(SumKind::occupation, geom, beta, mu, excluded, options);
}

double bose_log_lattice_sum(const BoxGeometry& geom, double beta, double mu,
                            std::span<const ModeIndex> excluded,
                            const LatticeSumOptions& options) {
  return lattice_sum(SumKind::log_partition, geom, beta, mu, excluded, options);
}

}  // namespace qavg

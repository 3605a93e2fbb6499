#include "qavg/ideal_bose.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qavg/parallel.hpp"
#include "qavg/root_finding.hpp"

namespace qavg {

namespace {

// zeta(3/2) by direct summation to N plus the Euler-Maclaurin tail; the first
// neglected correction is O(N^-9.5) ~ 1e-18 at N = 64.
double zeta_three_halves() {
  constexpr int kTerms = 64;
  constexpr double s = 1.5;
  detail::NeumaierSum sum;
  for (int m = kTerms - 1; m >= 1; --m) sum.add(std::pow(static_cast<double>(m), -s));
  const double n = kTerms;
  // sum_{m >= n} m^-s = n^(1-s)/(s-1) + n^-s/2 - sum_k B_2k/(2k)! f^(2k-1)(n)
  const double f = std::pow(n, -s);
  double tail = std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * f;
  tail += (1.0 / 12.0) * s * f / n;
  tail -= (1.0 / 720.0) * s * (s + 1) * (s + 2) * f / (n * n * n);
  tail += (1.0 / 30240.0) * s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * f / std::pow(n, 5);
  tail -= (1.0 / 1209600.0) * s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * (s + 5) * (s + 6) * f /
          std::pow(n, 7);
  sum.add(tail);
  return sum.value();
}

// Energy ceiling of the ball |k| <= radius, widened by rounding slack.
double band_ceiling(double radius) { return radius * radius * (1.0 + 1e-12); }

double thermal_volume_factor(double beta) { return std::pow(4.0 * kPi * beta, -1.5); }

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("inverse temperature must be positive and finite");
  }
}

}  // namespace

ThermoPoint::ThermoPoint(double beta_, ChemicalPotential mu) : beta(beta_), target(mu) {
  require_beta(beta);
}

ThermoPoint::ThermoPoint(double beta_, Density rho) : beta(beta_), target(rho) {
  require_beta(beta);
  if (!(rho.value > 0.0)) throw DomainError("density must be positive");
}

double critical_density(double beta) {
  require_beta(beta);
  static const double zeta = zeta_three_halves();
  return zeta * thermal_volume_factor(beta);
}

double bose_g32(double x) {
  if (x < 0.0) throw DomainError("g_3/2(exp(-x)) requires x >= 0");
  if (x == 0.0) return zeta_three_halves();
  if (x < 1.0) {
    // Robinson expansion: Gamma(-1/2) x^(1/2) + sum_k zeta(3/2 - k) (-x)^k / k!
    double sum = -2.0 * std::sqrt(kPi) * std::sqrt(x);
    double power = 1.0;
    for (int k = 0; k < 60; ++k) {
      const double term = std::riemann_zeta(1.5 - k) * power;
      sum += term;
      if (k > 2 && std::abs(term) < 1e-18 * std::abs(sum)) break;
      power *= -x / (k + 1);
    }
    return sum;
  }
  double sum = 0.0;
  const double q = std::exp(-x);
  double qm = q;
  for (int m = 1; m < 10000; ++m) {
    const double term = qm / (m * std::sqrt(static_cast<double>(m)));
    sum += term;
    if (term < 1e-18 * sum) break;
    qm *= q;
  }
  return sum;
}

double infinite_volume_density(double beta, double mu) {
  require_beta(beta);
  if (mu > 0.0) throw DomainError("infinite-volume density requires mu <= 0");
  return bose_g32(-beta * mu) * thermal_volume_factor(beta);
}

double finite_volume_density(const BoxGeometry& geom, double beta, double mu) {
  require_beta(beta);
  if (!(mu < 0.0)) throw DomainError("finite-volume density requires mu < 0");
  return bose_lattice_sum(geom, beta, mu);
}

double solve_mu_infinite(double beta, double rho) {
  require_beta(beta);
  if (!(rho > 0.0)) throw DomainError("density must be positive");
  if (rho >= critical_density(beta)) return 0.0;
  const double gap = solve_gap(
      [&](double g) { return infinite_volume_density(beta, -g); }, rho, 1.0 / beta,
      kDensityRootTolerance);
  return -gap;
}

double solve_mu(const BoxGeometry& geom, double beta, double rho) {
  require_beta(beta);
  if (!(rho > 0.0)) throw DomainError("density must be positive");
  const double rho_c = critical_density(beta);
  double guess;
  if (rho < 0.9 * rho_c) {
    guess = -solve_mu_infinite(beta, rho);
  } else {
    guess = 1.0 / (beta * geom.volume() * std::max(rho - rho_c, 1e-3 * rho));
  }
  const double gap = solve_gap([&](double g) { return bose_lattice_sum(geom, beta, -g); }, rho,
                               guess, kDensityRootTolerance);
  return -gap;
}

double resolve_mu(const BoxGeometry& geom, const ThermoPoint& point) {
  if (const auto* mu = std::get_if<ChemicalPotential>(&point.target)) return mu->value;
  return solve_mu(geom, point.beta, std::get<Density>(point.target).value);
}

std::vector<ModeDensity> mode_occupations(const BoxGeometry& geom, double beta, double mu,
                                          std::size_t top) {
  require_beta(beta);
  if (!(mu < 0.0)) throw DomainError("mode occupations require mu < 0");
  if (top == 0) return {};
  const auto s = spacings(geom);
  double cutoff = s[0] * s[0];
  std::vector<Mode> modes;
  for (;;) {
    modes = enumerate_modes(geom, cutoff);
    if (modes.size() >= top) break;
    cutoff *= 4.0;
  }
  modes.resize(top);
  std::vector<ModeDensity> out;
  out.reserve(top);
  for (const auto& m : modes) {
    out.push_back({m, bose_occupation(beta, m.energy, mu) / geom.volume()});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ModeDensity& a, const ModeDensity& b) { return a.density > b.density; });
  return out;
}

double band_density(const BoxGeometry& geom, double beta, double mu, double radius) {
  require_beta(beta);
  if (!(mu < 0.0)) throw DomainError("band density requires mu < 0");
  if (!(radius > 0.0)) throw DomainError("band radius must be positive");
  return detail::band_sum(
             geom, [&](double e) { return bose_occupation(beta, e, mu); },
             band_ceiling(radius)) /
         geom.volume();
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::none: return "NONE";
    case Verdict::type_i: return "TYPE_I";
    case Verdict::type_ii: return "TYPE_II";
    case Verdict::type_iii: return "TYPE_III";
  }
  return "UNKNOWN";
}

std::vector<double> geometric_schedule(double start, double ratio, std::size_t count) {
  if (!(start > 0.0) || !(ratio > 1.0)) {
    throw DomainError("geometric schedule needs start > 0 and ratio > 1");
  }
  std::vector<double> out(count);
  double v = start;
  for (auto& x : out) {
    x = v;
    v *= ratio;
  }
  return out;
}

CondensateReport sample_condensation(double alpha1, double beta, double rho,
                                     std::span<const double> volumes,
                                     const OccupationModel& model,
                                     const ClassifierOptions& options) {
  require_beta(beta);
  if (!(rho > 0.0)) throw DomainError("density must be positive");
  if (volumes.size() < 4) throw DomainError("volume schedule needs at least 4 volumes");
  for (std::size_t i = 1; i < volumes.size(); ++i) {
    if (!(volumes[i] > volumes[i - 1])) throw DomainError("volumes must be strictly increasing");
  }
  if (options.band_radius_count < 3) throw DomainError("need at least 3 band radii");

  std::vector<double> radii(options.band_radius_count);
  for (std::size_t m = 0; m < radii.size(); ++m) {
    radii[m] = options.band_radius_start / std::pow(2.0, static_cast<double>(m));
  }

  CondensateReport report;
  report.alpha1 = alpha1;
  report.beta = beta;
  report.total_density = rho;
  report.options = options;
  report.samples.resize(volumes.size());

  parallel_for(volumes.size(), [&](std::size_t i) {
    const auto geom = BoxGeometry::elongated(volumes[i], alpha1);
    VolumeSample& sample = report.samples[i];
    sample.volume = volumes[i];
    sample.mu = model.solve(geom, rho);
    sample.total_density = rho;
    for (const auto& index : options.tracked_modes) {
      sample.tracked_densities.push_back(
          model.occupation(geom, sample.mu, mode_energy(geom, index)) / geom.volume());
    }
    const double rough = model.rough_below ? model.rough_below(geom, sample.mu) : 0.0;
    for (double r : radii) {
      const double sum = detail::band_sum(
          geom, [&](double e) { return model.occupation(geom, sample.mu, e); }, band_ceiling(r),
          rough);
      sample.band_densities.push_back(sum / geom.volume());
    }
  });

  const auto& last = report.samples.back();
  report.mu_solution = last.mu;
  {
    const auto geom = BoxGeometry::elongated(volumes.back(), alpha1);
    const auto s = spacings(geom);
    double cutoff = s[0] * s[0];
    std::vector<Mode> modes;
    for (;;) {
      modes = enumerate_modes(geom, cutoff);
      if (modes.size() >= options.report_modes) break;
      cutoff *= 4.0;
    }
    modes.resize(options.report_modes);
    for (const auto& m : modes) {
      report.per_mode.push_back(
          {m, model.occupation(geom, last.mu, m.energy) / geom.volume()});
    }
  }

  std::vector<double> xs(volumes.begin(), volumes.end());
  for (std::size_t k = 0; k < options.tracked_modes.size(); ++k) {
    std::vector<double> ys;
    for (const auto& sample : report.samples) ys.push_back(sample.tracked_densities[k]);
    TrackedModeLimit lim;
    lim.index = options.tracked_modes[k];
    lim.fit = extrapolate_limit(xs, ys, options.mode_fit);
    lim.limit = std::max(lim.fit.limit, 0.0);
    lim.log_log_slope = log_log_slope(xs, ys);
    report.mode_limits.push_back(lim);
  }
  report.max_mode_density = 0.0;
  for (const auto& lim : report.mode_limits) {
    report.max_mode_density = std::max(report.max_mode_density, lim.limit);
  }

  std::vector<double> inv_radius, band_at_radius;
  for (std::size_t m = 0; m < radii.size(); ++m) {
    std::vector<double> ys;
    for (const auto& sample : report.samples) ys.push_back(sample.band_densities[m]);
    BandLimit band;
    band.radius = radii[m];
    band.fit = fit_constant_plus_power(xs, ys, options.band_fit);
    band.limit = band.fit.limit;
    report.band_limits.push_back(band);
  }
  // radius -> 0 is x = 1/radius -> infinity; feed in increasing order.
  for (auto it = report.band_limits.begin(); it != report.band_limits.end(); ++it) {
    inv_radius.push_back(1.0 / it->radius);
    band_at_radius.push_back(it->limit);
  }
  report.band_radius_fit = fit_constant_plus_power(inv_radius, band_at_radius, options.band_fit);
  report.band_density = std::max(report.band_radius_fit.limit, 0.0);
  return report;
}

void assign_verdict(CondensateReport& report, double excess) {
  const auto& opt = report.options;
  std::ostringstream why;
  if (!(excess > 0.0)) {
    report.verdict = Verdict::none;
    report.rationale = "density does not exceed the saturation density";
    return;
  }
  const double threshold = opt.macroscopic_fraction * excess;
  const double full = (1.0 - opt.type_tolerance) * excess;

  double zero_mode = 0.0;
  int macroscopic_modes = 0;
  bool all_vanish = true;
  for (auto& lim : report.mode_limits) {
    lim.macroscopic = lim.limit >= threshold;
    lim.vanishing = !lim.macroscopic && lim.log_log_slope < 0.0;
    const int orbit = (lim.index[0] ? 2 : 1) * (lim.index[1] ? 2 : 1) * (lim.index[2] ? 2 : 1);
    if (lim.macroscopic) macroscopic_modes += orbit;
    if (!lim.vanishing) all_vanish = false;
    if (lim.index == ModeIndex{0, 0, 0}) zero_mode = lim.limit;
  }

  why << "excess=" << excess << " zero_mode_limit=" << zero_mode
      << " macroscopic_modes=" << macroscopic_modes << " band_limit=" << report.band_density;

  if (zero_mode >= full) {
    report.verdict = Verdict::type_i;
    why << "; the zero mode carries the condensate";
  } else if (macroscopic_modes >= 2 && report.max_mode_density < full) {
    report.verdict = Verdict::type_ii;
    why << "; several modes are macroscopically occupied";
  } else if (all_vanish && std::abs(report.band_density - excess) <= opt.type_tolerance * excess) {
    report.verdict = Verdict::type_iii;
    why << "; no single mode is macroscopic but the band holds the condensate";
  } else {
    report.rationale = why.str();
    throw ClassificationError("extrapolated occupations match no condensation type: " +
                                  report.rationale,
                              report);
  }
  report.rationale = why.str();
}

CondensateReport classify_condensation(double alpha1, double beta, double rho,
                                       std::span<const double> volumes,
                                       const ClassifierOptions& options) {
  if (!(alpha1 > 1.0 / 3.0 - 1e-15 && alpha1 < 1.0)) {
    throw DomainError("alpha1 must lie in [1/3, 1)");
  }
  OccupationModel ideal;
  ideal.solve = [beta](const BoxGeometry& geom, double density) {
    return solve_mu(geom, beta, density);
  };
  ideal.occupation = [beta](const BoxGeometry&, double mu, double energy) {
    return bose_occupation(beta, energy, mu);
  };
  CondensateReport report = sample_condensation(alpha1, beta, rho, volumes, ideal, options);
  report.critical_density = critical_density(beta);
  report.condensate_density = std::max(0.0, rho - report.critical_density);
  assign_verdict(report, report.condensate_density);
  return report;
}

}  // namespace qavg

#include "qavg/interacting_diagonal.hpp"

#include <algorithm>
#include <cmath>

#include "qavg/root_finding.hpp"

namespace qavg {

namespace {

constexpr std::size_t kTermCap = 10'000'000;
constexpr double kTermCutoff = 1e-18;
constexpr double kOccupationCeiling = 50.0;

// Occupations bend sharply within a few sqrt(a / (beta V)) of mu.
double rough_energy(double coupling, double beta, double mu, double volume) {
  return mu + 20.0 * std::sqrt(coupling / (beta * volume));
}

}  // namespace

DiagonalModel::DiagonalModel(double coupling_, BoxGeometry geometry_)
    : coupling(coupling_), geometry(geometry_) {
  if (!(coupling > 0.0) || !std::isfinite(coupling)) {
    throw DomainError("interaction coupling must be positive");
  }
}

ModeStatistics mode_statistics(double energy, double beta, double mu, double coupling,
                               double volume) {
  if (!(beta > 0.0)) throw DomainError("inverse temperature must be positive");
  if (!(coupling > 0.0)) throw DomainError("interaction coupling must be positive");
  if (!(volume > 0.0)) throw DomainError("volume must be positive");
  if (!std::isfinite(mu) || !std::isfinite(energy)) throw DomainError("non-finite argument");

  const double linear = energy - mu;
  const double quadratic = coupling / (2.0 * volume);
  auto exponent = [&](double n) { return -beta * (linear * n + quadratic * n * (n - 1.0)); };

  // The summand is log-concave in n with its maximum near this point.
  const double peak = 0.5 - linear / (2.0 * quadratic);
  const double n0 = peak > 0.0 ? std::round(peak) : 0.0;
  const double e0 = exponent(n0);

  // Moments are taken about n0 to keep the variance free of cancellation.
  detail::NeumaierSum z, m1, m2;
  std::size_t terms = 0;
  auto accumulate = [&](double n) {
    const double w = std::exp(exponent(n) - e0);
    const double d = n - n0;
    z.add(w);
    m1.add(w * d);
    m2.add(w * d * d);
    if (++terms > kTermCap) {
      throw AccuracyError("single-mode partition sum exceeded 1e7 terms");
    }
    return w;
  };

  accumulate(n0);
  for (double n = n0 + 1.0;; n += 1.0) {
    if (accumulate(n) < kTermCutoff * z.value()) break;
  }
  for (double n = n0 - 1.0; n >= 0.0; n -= 1.0) {
    if (accumulate(n) < kTermCutoff * z.value()) break;
  }

  ModeStatistics stats;
  const double zv = z.value();
  const double shift = m1.value() / zv;
  stats.log_partition = e0 + std::log(zv);
  stats.mean_occupation = n0 + shift;
  stats.occupation_variance = std::max(m2.value() / zv - shift * shift, 0.0);
  stats.terms = terms;
  return stats;
}

double interacting_density(const DiagonalModel& model, double beta, double mu) {
  const double v = model.geometry.volume();
  // Above mu + 50/beta a mode holds less than exp(-50) particles on average.
  const double ceiling = std::max(mu, 0.0) + kOccupationCeiling / beta;
  const double rough = rough_energy(model.coupling, beta, mu, v);
  return detail::band_sum(
             model.geometry,
             [&](double e) { return mode_statistics(e, beta, mu, model.coupling, v).mean_occupation; },
             ceiling, rough) /
         v;
}

double solve_mu_interacting(const DiagonalModel& model, double beta, double rho) {
  if (!(rho > 0.0)) throw DomainError("density must be positive");
  const double rho_c = critical_density(beta);
  const double guess = rho < 0.9 * rho_c ? solve_mu_infinite(beta, rho) : 0.0;
  return solve_increasing([&](double mu) { return interacting_density(model, beta, mu); }, rho,
                          guess, 0.05, kInteractingRootTolerance * rho);
}

CondensateReport classify_interacting(double coupling, double alpha1, double beta, double rho,
                                      std::span<const double> volumes,
                                      const ClassifierOptions& options) {
  if (!(coupling > 0.0)) throw DomainError("interaction coupling must be positive");
  if (!(alpha1 > 1.0 / 3.0 - 1e-15 && alpha1 < 1.0)) {
    throw DomainError("alpha1 must lie in [1/3, 1)");
  }
  OccupationModel interacting;
  interacting.solve = [=](const BoxGeometry& geom, double density) {
    return solve_mu_interacting(DiagonalModel(coupling, geom), beta, density);
  };
  interacting.occupation = [=](const BoxGeometry& geom, double mu, double energy) {
    return mode_statistics(energy, beta, mu, coupling, geom.volume()).mean_occupation;
  };
  interacting.rough_below = [=](const BoxGeometry& geom, double mu) {
    return rough_energy(coupling, beta, mu, geom.volume());
  };
  CondensateReport report = sample_condensation(alpha1, beta, rho, volumes, interacting, options);
  report.critical_density = critical_density(beta);
  const double band = report.band_density;
  report.condensate_density = band >= options.macroscopic_fraction * rho ? band : 0.0;
  assign_verdict(report, report.condensate_density);
  return report;
}

}  // namespace qavg

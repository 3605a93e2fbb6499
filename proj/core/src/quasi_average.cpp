#include "qavg/quasi_average.hpp"

#include <algorithm>
#include <cmath>

#include "qavg/parallel.hpp"
#include "qavg/root_finding.hpp"

namespace qavg {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

bool unsettled(const PowerLawFit& fit, std::span<const double> ys, double tolerance) {
  double scale = std::abs(fit.limit);
  for (double y : ys) scale = std::max(scale, std::abs(y));
  return fit.residual > tolerance * scale;
}

void require_negative_mu(double mu) {
  if (!(mu < 0.0)) throw DomainError("sourced gas requires mu < 0");
}

}  // namespace

SourceField::SourceField(double amplitude_, double phase_, ModeIndex mode_index_)
    : amplitude(amplitude_), mode_index(mode_index_) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw DomainError("source amplitude must be finite and non-negative");
  }
  if (!std::isfinite(phase_)) throw DomainError("source phase must be finite");
  phase = std::fmod(phase_, kTwoPi);
  if (phase < 0.0) phase += kTwoPi;
  if (phase >= kTwoPi) phase = 0.0;
}

SourceField SourceField::from_complex(std::complex<double> lambda, ModeIndex mode_index) {
  return SourceField(std::abs(lambda), std::arg(lambda), mode_index);
}

ModeIndex selected_mode(const BoxGeometry& geom, const SourceField& src) {
  if (!src.fixed_momentum) return src.mode_index;
  const auto s = spacings(geom);
  ModeIndex index{};
  for (int j = 0; j < 3; ++j) {
    index[j] = static_cast<std::int64_t>(std::llround((*src.fixed_momentum)[j] / s[j]));
  }
  return index;
}

double source_term(const BoxGeometry& geom, double mu, const SourceField& src) {
  const double gap = mode_energy(geom, selected_mode(geom, src)) - mu;
  return src.amplitude * src.amplitude / (gap * gap);
}

double selected_mode_density(const BoxGeometry& geom, double beta, double mu,
                             const SourceField& src) {
  require_negative_mu(mu);
  const double e = mode_energy(geom, selected_mode(geom, src));
  return bose_occupation(beta, e, mu) / geom.volume() + source_term(geom, mu, src);
}

double sourced_density(const BoxGeometry& geom, double beta, double mu, const SourceField& src) {
  require_negative_mu(mu);
  return bose_lattice_sum(geom, beta, mu) + source_term(geom, mu, src);
}

double solve_mu_sourced(const BoxGeometry& geom, double beta, double rho,
                        const SourceField& src) {
  if (src.amplitude == 0.0) return solve_mu(geom, beta, rho);
  if (!(beta > 0.0)) throw DomainError("inverse temperature must be positive");
  if (!(rho > 0.0)) throw DomainError("density must be positive");
  const double rho_c = critical_density(beta);
  double guess = src.amplitude / std::sqrt(rho);
  if (rho > rho_c) {
    guess = std::max(guess, src.amplitude / std::sqrt(rho - rho_c));
  } else {
    guess = std::max(guess, -solve_mu_infinite(beta, rho));
  }
  const double gap = solve_gap([&](double g) { return sourced_density(geom, beta, -g, src); },
                               rho, guess, kDensityRootTolerance);
  return -gap;
}

double solve_mu_sourced_infinite(double beta, double rho, double amplitude) {
  if (!(amplitude > 0.0)) return solve_mu_infinite(beta, rho);
  if (!(rho > 0.0)) throw DomainError("density must be positive");
  const double excess = std::abs(rho - critical_density(beta));
  const double guess = amplitude / std::sqrt(std::max(excess, 1e-6 * rho));
  const double gap = solve_gap(
      [&](double g) { return infinite_volume_density(beta, -g) + amplitude * amplitude / (g * g); },
      rho, guess, kDensityRootTolerance);
  return -gap;
}

double pressure(const BoxGeometry& geom, double beta, double mu, const SourceField& src) {
  require_negative_mu(mu);
  if (src.fixed_momentum || src.mode_index != ModeIndex{0, 0, 0}) {
    throw DomainError("pressure is defined for a zero-mode source");
  }
  return bose_log_lattice_sum(geom, beta, mu) / beta - src.amplitude * src.amplitude / mu;
}

std::complex<double> pressure_wirtinger(double mu, const SourceField& src) {
  require_negative_mu(mu);
  return -std::conj(src.value()) / mu;
}

std::complex<double> pressure_wirtinger_numeric(const BoxGeometry& geom, double beta, double mu,
                                                const SourceField& src, double step) {
  if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
  const std::complex<double> lambda = src.value();
  auto p = [&](std::complex<double> l) {
    return pressure(geom, beta, mu, SourceField::from_complex(l));
  };
  const double d_re = (p(lambda + step) - p(lambda - step)) / (2.0 * step);
  const std::complex<double> i_step(0.0, step);
  const double d_im = (p(lambda + i_step) - p(lambda - i_step)) / (2.0 * step);
  return 0.5 * std::complex<double>(d_re, -d_im);
}

LimitSchedule LimitSchedule::standard() {
  LimitSchedule s;
  s.volumes = geometric_schedule(1e7, 10.0, 7);
  for (int m = 0; m < 8; ++m) s.amplitudes.push_back(1e-2 * std::pow(2.0, -m));
  return s;
}

void LimitSchedule::validate() const {
  if (volumes.size() < 4) throw DomainError("volume schedule needs at least 4 entries");
  if (amplitudes.size() < 4) throw DomainError("amplitude schedule needs at least 4 entries");
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    if (!(volumes[i] > 0.0)) throw DomainError("volumes must be positive");
    if (i > 0 && !(volumes[i] > volumes[i - 1])) {
      throw DomainError("volumes must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (!(amplitudes[i] > 0.0)) throw DomainError("amplitudes must be positive");
    if (i > 0 && !(amplitudes[i] < amplitudes[i - 1])) {
      throw DomainError("amplitudes must be strictly decreasing");
    }
  }
  if (!(tolerance > 0.0)) throw DomainError("schedule tolerance must be positive");
}

LemmaReport lemma41_check(double beta, double rho, const LimitSchedule& schedule, double alpha1) {
  schedule.validate();
  const double rho_c = critical_density(beta);
  if (!(rho > rho_c)) throw DomainError("the amplitude law needs rho above the critical density");

  LemmaReport report;
  report.beta = beta;
  report.rho = rho;
  report.excess = rho - rho_c;
  report.alpha1 = alpha1;
  report.schedule = schedule;

  const std::size_t nv = schedule.volumes.size();
  const std::size_t na = schedule.amplitudes.size();
  std::vector<double> mu(nv * na);
  parallel_for(nv * na, [&](std::size_t cell) {
    const std::size_t j = cell / nv, i = cell % nv;
    const auto geom = BoxGeometry::elongated(schedule.volumes[i], alpha1);
    mu[cell] = solve_mu_sourced(geom, beta, rho, SourceField(schedule.amplitudes[j], 0.0));
  });

  const double root_excess = std::sqrt(report.excess);
  for (std::size_t j = 0; j < na; ++j) {
    LemmaRow row;
    row.amplitude = schedule.amplitudes[j];
    std::span<const double> ys(mu.data() + j * nv, nv);
    row.fit = fit_constant_plus_power(schedule.volumes, ys);
    row.mu_limit = row.fit.limit;
    row.mu_infinite = solve_mu_sourced_infinite(beta, rho, row.amplitude);
    row.correction = row.mu_limit + row.amplitude / root_excess;
    row.correction_ratio = row.correction / row.amplitude;
    row.mu_ratio = row.mu_limit / row.amplitude;
    row.inconclusive = unsettled(row.fit, ys, schedule.tolerance);
    report.rows.push_back(row);
  }

  report.correction_positive = std::all_of(report.rows.begin(), report.rows.end(),
                                           [](const LemmaRow& r) { return r.correction > 0.0; });
  report.ratio_decreasing = true;
  for (std::size_t j = 1; j < report.rows.size(); ++j) {
    if (!(report.rows[j].correction_ratio < report.rows[j - 1].correction_ratio)) {
      report.ratio_decreasing = false;
    }
  }
  report.inconclusive = std::any_of(report.rows.begin(), report.rows.end(),
                                    [](const LemmaRow& r) { return r.inconclusive; });
  return report;
}

// --- quasi-average double limit ---------------------------------------------

namespace {

struct CellResult {
  double mu = 0.0;
  double selected_density = 0.0;
  double source_term = 0.0;
  double field_modulus = 0.0;
  double band_density = 0.0;
  std::vector<double> offmode;
};

CellResult evaluate_cell(double alpha1, double beta, double rho, double volume,
                         const SourceField& src, const QuasiAverageOptions& options) {
  const auto geom = BoxGeometry::elongated(volume, alpha1);
  CellResult cell;
  cell.mu = solve_mu_sourced(geom, beta, rho, src);
  const ModeIndex q = selected_mode(geom, src);
  const double eq = mode_energy(geom, q);
  cell.source_term = source_term(geom, cell.mu, src);
  cell.selected_density = bose_occupation(beta, eq, cell.mu) / volume + cell.source_term;
  cell.field_modulus = src.amplitude / (eq - cell.mu);
  for (const auto& offset : options.offmode_offsets) {
    const ModeIndex k{q[0] + offset[0], q[1] + offset[1], q[2] + offset[2]};
    cell.offmode.push_back(bose_occupation(beta, mode_energy(geom, k), cell.mu) / volume);
  }
  cell.band_density = band_density(geom, beta, cell.mu, options.band_radius);
  if (eq <= options.band_radius * options.band_radius * (1.0 + 1e-12)) {
    cell.band_density += cell.source_term;
  }
  return cell;
}

}  // namespace

QuasiAverageResult run_quasi_average(double alpha1, double beta, double rho, double phase,
                                     const LimitSchedule& schedule, const SourceField& selection,
                                     const QuasiAverageOptions& options) {
  schedule.validate();
  if (!(beta > 0.0)) throw DomainError("inverse temperature must be positive");
  if (!(rho > 0.0)) throw DomainError("density must be positive");
  if (options.offmode_offsets.empty()) throw DomainError("need at least one off-mode offset");
  for (const auto& o : options.offmode_offsets) {
    if (o == ModeIndex{0, 0, 0}) throw DomainError("off-mode offsets must be nonzero");
  }

  QuasiAverageResult result;
  result.alpha1 = alpha1;
  result.beta = beta;
  result.rho = rho;
  result.critical_density = critical_density(beta);
  result.schedule = schedule;
  result.band_radius = options.band_radius;
  result.offmode_indices = options.offmode_offsets;
  result.source = selection;
  result.source.amplitude = 0.0;
  result.source.phase = SourceField(0.0, phase).phase;

  const std::size_t nv = schedule.volumes.size();
  const std::size_t na = schedule.amplitudes.size();
  // Rows 0..na-1 carry the schedule amplitudes; row na is the unsourced run.
  std::vector<CellResult> cells(nv * (na + 1));
  parallel_for(cells.size(), [&](std::size_t c) {
    const std::size_t j = c / nv, i = c % nv;
    SourceField src = result.source;
    src.amplitude = j < na ? schedule.amplitudes[j] : 0.0;
    cells[c] = evaluate_cell(alpha1, beta, rho, schedule.volumes[i], src, options);
  });

  for (std::size_t j = 0; j <= na; ++j) {
    for (std::size_t i = 0; i < nv; ++i) {
      const auto& cell = cells[j * nv + i];
      result.mu_trace.push_back({schedule.volumes[i], j < na ? schedule.amplitudes[j] : 0.0,
                                 cell.mu, cell.selected_density, cell.source_term,
                                 cell.band_density});
    }
  }

  auto volume_limit = [&](const std::string& name, double amplitude,
                          const std::vector<double>& ys) {
    LimitDiagnostics d;
    d.quantity = name;
    d.amplitude = amplitude;
    d.fit = extrapolate_limit(schedule.volumes, ys);
    d.inconclusive = unsettled(d.fit, ys, schedule.tolerance);
    result.convergence.push_back(d);
    return std::max(d.fit.limit, 0.0);
  };

  std::vector<double> bec(na), field(na), odlro(na), offmode(na);
  for (std::size_t j = 0; j < na; ++j) {
    std::vector<double> sel(nv), fm(nv), fm2(nv);
    for (std::size_t i = 0; i < nv; ++i) {
      const auto& cell = cells[j * nv + i];
      sel[i] = cell.selected_density;
      fm[i] = cell.field_modulus;
      fm2[i] = cell.field_modulus * cell.field_modulus;
    }
    const double a = schedule.amplitudes[j];
    bec[j] = volume_limit("selected_mode_density", a, sel);
    field[j] = volume_limit("field_modulus", a, fm);
    odlro[j] = volume_limit("field_modulus_squared", a, fm2);
    offmode[j] = 0.0;
    for (std::size_t k = 0; k < options.offmode_offsets.size(); ++k) {
      std::vector<double> ys(nv);
      for (std::size_t i = 0; i < nv; ++i) ys[i] = cells[j * nv + i].offmode[k];
      offmode[j] = std::max(offmode[j], volume_limit("offmode_density", a, ys));
    }
  }

  std::vector<double> inv_amp(na);
  for (std::size_t j = 0; j < na; ++j) inv_amp[j] = 1.0 / schedule.amplitudes[j];
  auto amplitude_limit = [&](const std::string& name, const std::vector<double>& ys) {
    LimitDiagnostics d;
    d.quantity = name;
    const bool all_zero = std::all_of(ys.begin(), ys.end(), [](double y) { return y == 0.0; });
    if (!all_zero) {
      d.fit = extrapolate_limit(inv_amp, ys);
      d.inconclusive = unsettled(d.fit, ys, schedule.tolerance);
    }
    result.convergence.push_back(d);
    return std::max(d.fit.limit, 0.0);
  };

  result.bec_density = amplitude_limit("selected_mode_density", bec);
  const double modulus = amplitude_limit("field_modulus", field);
  result.odlro_density = amplitude_limit("field_modulus_squared", odlro);
  result.offmode_max = amplitude_limit("offmode_density", offmode);
  result.ssb_parameter = std::polar(modulus, result.source.phase);

  std::vector<double> unsourced(nv);
  for (std::size_t i = 0; i < nv; ++i) unsourced[i] = cells[na * nv + i].selected_density;
  result.unsourced_selected_density = volume_limit("unsourced_selected_density", 0.0, unsourced);

  result.inconclusive = std::any_of(result.convergence.begin(), result.convergence.end(),
                                    [](const LimitDiagnostics& d) { return d.inconclusive; });
  return result;
}

}  // namespace qavg

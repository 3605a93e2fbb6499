#include "qavg/extrapolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qavg/errors.hpp"

namespace qavg {

namespace {

void check_samples(std::span<const double> x, std::span<const double> y, std::size_t min_points) {
  if (x.size() != y.size()) throw DomainError("extrapolation: x and y differ in length");
  if (x.size() < min_points) {
    throw DomainError("extrapolation needs at least " + std::to_string(min_points) + " samples");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !std::isfinite(y[i])) throw DomainError("extrapolation: invalid sample");
    if (i > 0 && !(x[i] > x[i - 1])) {
      throw DomainError("extrapolation: abscissae must be strictly increasing");
    }
  }
}

double spread(std::span<const double> y) {
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  return *hi - *lo;
}

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double sse = 0.0;
};

LinearFit linear_fit(std::span<const double> z, std::span<const double> y) {
  const double n = static_cast<double>(z.size());
  double zm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    zm += z[i];
    ym += y[i];
  }
  zm /= n;
  ym /= n;
  double szz = 0.0, szy = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    szz += (z[i] - zm) * (z[i] - zm);
    szy += (z[i] - zm) * (y[i] - ym);
  }
  LinearFit fit;
  fit.slope = szz > 0.0 ? szy / szz : 0.0;
  fit.intercept = ym - fit.slope * zm;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * z[i];
    fit.sse += r * r;
  }
  return fit;
}

// z_i = (x_i / x_0)^-p keeps the regressor O(1) for any exponent.
LinearFit fit_at_exponent(std::span<const double> x, std::span<const double> y, double p,
                          std::vector<double>& z) {
  z.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::pow(x[i] / x[0], -p);
  return linear_fit(z, y);
}

// Minimizes sse(log p) over [log lo, log hi]: coarse scan, then golden
// section on the neighbouring cells. Returns the minimizing exponent.
template <class Sse>
double minimize_exponent(Sse&& sse_at, const FitOptions& options) {
  const double lo = std::log(options.min_exponent);
  const double hi = std::log(options.max_exponent);
  constexpr int kScan = 240;
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double s = sse_at(lo + (hi - lo) * i / kScan);
    if (s < best_sse) {
      best_sse = s;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / kScan;
  double b = lo + (hi - lo) * std::min(best + 1, kScan) / kScan;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = sse_at(c), fd = sse_at(d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = sse_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = sse_at(d);
    }
  }
  double log_p = 0.5 * (a + b);
  if (sse_at(log_p) > best_sse) log_p = lo + (hi - lo) * best / kScan;
  return std::exp(log_p);
}

// Least squares y = a z + b z^2 with z_i = (x_i / x_0)^-p.
struct CorrectedFit {
  double a = 0.0;
  double b = 0.0;
  double sse = 0.0;
};

CorrectedFit corrected_at_exponent(std::span<const double> x, std::span<const double> y,
                                   double p) {
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, t1 = 0.0, t2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = std::pow(x[i] / x[0], -p);
    s11 += z * z;
    s12 += z * z * z;
    s22 += z * z * z * z;
    t1 += z * y[i];
    t2 += z * z * y[i];
  }
  CorrectedFit fit;
  const double det = s11 * s22 - s12 * s12;
  if (det > 0.0) {
    fit.a = (t1 * s22 - t2 * s12) / det;
    fit.b = (s11 * t2 - s12 * t1) / det;
  } else {
    fit.a = s11 > 0.0 ? t1 / s11 : 0.0;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = std::pow(x[i] / x[0], -p);
    const double r = y[i] - fit.a * z - fit.b * z * z;
    fit.sse += r * r;
  }
  return fit;
}

}  // namespace

PowerLawFit fit_constant_plus_power(std::span<const double> x, std::span<const double> y,
                                    const FitOptions& options) {
  check_samples(x, y, 3);
  std::vector<double> z;
  const double p = minimize_exponent(
      [&](double log_p) { return fit_at_exponent(x, y, std::exp(log_p), z).sse; }, options);
  const LinearFit lf = fit_at_exponent(x, y, p, z);
  PowerLawFit fit;
  fit.limit = lf.intercept;
  fit.exponent = p;
  fit.amplitude = lf.slope * std::pow(x[0], p);
  fit.points = x.size();
  fit.residual = std::sqrt(lf.sse / static_cast<double>(x.size()));
  const double s = spread(y);
  fit.relative_residual = s > 0.0 ? fit.residual / s : 0.0;
  return fit;
}

PowerLawFit fit_corrected_power(std::span<const double> x, std::span<const double> y,
                                const FitOptions& options) {
  check_samples(x, y, 3);
  const double p = minimize_exponent(
      [&](double log_p) { return corrected_at_exponent(x, y, std::exp(log_p)).sse; }, options);
  const CorrectedFit cf = corrected_at_exponent(x, y, p);
  PowerLawFit fit;
  fit.limit = 0.0;
  fit.exponent = p;
  fit.amplitude = cf.a * std::pow(x[0], p);
  fit.points = x.size();
  fit.residual = std::sqrt(cf.sse / static_cast<double>(x.size()));
  const double s = spread(y);
  fit.relative_residual = s > 0.0 ? fit.residual / s : 0.0;
  return fit;
}

PowerLawFit fit_pure_power(std::span<const double> x, std::span<const double> y) {
  check_samples(x, y, 2);
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) throw DomainError("pure power fit requires positive samples");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const LinearFit lf = linear_fit(lx, ly);
  PowerLawFit fit;
  fit.limit = 0.0;
  fit.exponent = -lf.slope;
  fit.amplitude = std::exp(lf.intercept);
  fit.points = x.size();
  // Residual in log space: the typical relative misfit.
  fit.relative_residual = std::sqrt(lf.sse / static_cast<double>(x.size()));
  fit.residual = fit.relative_residual * y.back();
  return fit;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  return -fit_pure_power(x, y).exponent;
}

PowerLawFit extrapolate_limit(std::span<const double> x, std::span<const double> y,
                              const LimitOptions& options) {
  PowerLawFit general = fit_constant_plus_power(x, y, options.fit);
  const bool positive = std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; });
  if (!positive) return general;
  const PowerLawFit pure = fit_pure_power(x, y);
  if (pure.exponent >= options.pure_power_min_exponent &&
      pure.relative_residual <= options.pure_power_residual) {
    return pure;
  }
  // Same parameter count as the general model; preferred only if it fits
  // at least as well.
  FitOptions decaying = options.fit;
  decaying.min_exponent = std::max(decaying.min_exponent, options.pure_power_min_exponent);
  const PowerLawFit corrected = fit_corrected_power(x, y, decaying);
  if (corrected.amplitude > 0.0 && corrected.residual <= general.residual) return corrected;
  return general;
}

}  // namespace qavg

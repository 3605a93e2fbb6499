#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

#include "qavg/errors.hpp"

namespace qavg {

struct RootResult {
  double root = 0.0;
  double value = 0.0;  // f(root)
  double lower = 0.0;  // final bracket
  double upper = 0.0;
  std::size_t evaluations = 0;
};

/// Finds x in [lower, upper] with |f(x) - target| <= tolerance, where f is
/// strictly decreasing and f(lower) > target > f(upper). Bisection safeguarded
/// Illinois false position. Throws ConvergenceError if the bracket collapses or
/// the iteration cap is hit first.
template <class F>
RootResult solve_decreasing(F&& f, double target, double lower, double upper, double f_lower,
                            double f_upper, double tolerance, std::size_t max_iterations = 400) {
  RootResult result;
  double a = lower, b = upper;
  double fa = f_lower - target, fb = f_upper - target;
  int side = 0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    double x;
    // Alternate with plain bisection every few steps to guarantee shrinkage.
    if (it % 4 == 3) {
      x = 0.5 * (a + b);
    } else {
      x = (a * fb - b * fa) / (fb - fa);
      if (!(x > a && x < b)) x = 0.5 * (a + b);
    }
    const double fx = f(x) - target;
    ++result.evaluations;
    if (std::abs(fx) <= tolerance) {
      result.root = x;
      result.value = fx + target;
      result.lower = a;
      result.upper = b;
      return result;
    }
    if (fx > 0.0) {
      a = x;
      fa = fx;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = x;
      fb = fx;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    if (!(b - a > 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)))) {
      break;
    }
  }
  std::ostringstream msg;
  msg << "root refinement stalled before reaching tolerance " << tolerance;
  throw ConvergenceError(msg.str(), a, b);
}

/// Solves density(gap) = target for gap > 0, where density is strictly
/// decreasing, diverges as gap -> 0+ and vanishes as gap -> infinity (the gap
/// is the distance of the chemical potential below the spectrum floor). Works
/// in log(gap) against log(density) so that the 1/gap pole becomes linear.
/// Returns the gap; |density - target| <= relative_tolerance * target.
template <class F>
double solve_gap(F&& density, double target, double gap_guess, double relative_tolerance) {
  if (!(target > 0.0)) throw DomainError("target density must be positive");
  double gap = gap_guess > 0.0 && std::isfinite(gap_guess) ? gap_guess : 1.0;
  double lo = gap, hi = gap;
  double f_lo = density(lo), f_hi = f_lo;
  if (std::abs(f_lo - target) <= relative_tolerance * target) return gap;
  int steps = 0;
  while (!(f_hi < target)) {
    hi *= 4.0;
    f_hi = density(hi);
    if (++steps > 2000 || !std::isfinite(hi)) {
      throw ConvergenceError("could not bracket the density root from above", lo, hi);
    }
  }
  steps = 0;
  while (!(f_lo > target)) {
    lo *= 0.25;
    f_lo = density(lo);
    if (++steps > 2000 || !(lo > 0.0)) {
      throw ConvergenceError("could not bracket the density root from below", lo, hi);
    }
  }
  const double log_target = std::log(target);
  auto log_density = [&](double u) { return std::log(density(std::exp(u))); };
  // Small margin keeps rounding in the log/exp round trip inside tolerance.
  const double log_tol = std::log1p(relative_tolerance) * (1.0 - 1e-3);
  const auto result = solve_decreasing(log_density, log_target, std::log(lo), std::log(hi),
                                       std::log(f_lo), f_hi > 0.0 ? std::log(f_hi) : -745.0,
                                       log_tol);
  return std::exp(result.root);
}

/// Solves f(x) = target for strictly increasing f on the whole real line,
/// expanding a bracket around x_guess with steps growing geometrically from
/// `step`. |f - target| <= absolute_tolerance on return.
template <class F>
double solve_increasing(F&& f, double target, double x_guess, double step,
                        double absolute_tolerance) {
  double lo = x_guess, hi = x_guess;
  double f_lo = f(lo), f_hi = f_lo;
  if (std::abs(f_lo - target) <= absolute_tolerance) return x_guess;
  int steps = 0;
  double h = step;
  while (!(f_hi > target)) {
    hi += h;
    h *= 2.0;
    f_hi = f(hi);
    if (++steps > 200) throw ConvergenceError("could not bracket the root from above", lo, hi);
  }
  steps = 0;
  h = step;
  while (!(f_lo < target)) {
    lo -= h;
    h *= 2.0;
    f_lo = f(lo);
    if (++steps > 200) throw ConvergenceError("could not bracket the root from below", lo, hi);
  }
  auto negated = [&](double x) { return -f(x); };
  return solve_decreasing(negated, -target, lo, hi, -f_lo, -f_hi, absolute_tolerance).root;
}

}  // namespace qavg

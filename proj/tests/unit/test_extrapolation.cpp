#include <doctest.h>

#include <cmath>
#include <vector>

#include "qavg/extrapolation.hpp"
#include "qavg/root_finding.hpp"

using namespace qavg;

namespace {

std::vector<double> geometric(double start, double ratio, int n) {
  std::vector<double> x;
  for (int i = 0; i < n; ++i) x.push_back(start * std::pow(ratio, i));
  return x;
}

}  // namespace

TEST_CASE("constant plus power law is recovered exactly") {
  const auto x = geometric(1e3, 4.0, 7);
  for (double p : {0.3, 0.5, 1.0, 2.0}) {
    std::vector<double> y;
    for (double v : x) y.push_back(0.25 + 3.0 * std::pow(v, -p));
    const auto fit = fit_constant_plus_power(x, y);
    CAPTURE(p);
    CHECK(fit.limit == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(fit.exponent == doctest::Approx(p).epsilon(1e-5));
    CHECK(fit.residual < 1e-10);
  }
}

TEST_CASE("pure power decay extrapolates to zero") {
  const auto x = geometric(1e4, 10.0, 7);
  std::vector<double> y;
  for (double v : x) y.push_back(5.0 * std::pow(v, -0.4));
  const auto fit = extrapolate_limit(x, y);
  CHECK(fit.limit == 0.0);
  CHECK(fit.exponent == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(log_log_slope(x, y) == doctest::Approx(-0.4).epsilon(1e-12));
}

TEST_CASE("corrected power law is recovered") {
  const auto x = geometric(1e4, 10.0, 7);
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 * std::pow(v, -0.3) - 5.0 * std::pow(v, -0.6));
  const auto fit = fit_corrected_power(x, y);
  CHECK(fit.limit == 0.0);
  CHECK(fit.exponent == doctest::Approx(0.3).epsilon(1e-5));
  CHECK(fit.residual < 1e-10);
}

TEST_CASE("a nonzero limit is not mistaken for a decay") {
  const auto x = geometric(1e4, 10.0, 7);
  std::vector<double> y;
  for (double v : x) y.push_back(0.1 + 0.05 * std::pow(v, -0.5));
  const auto fit = extrapolate_limit(x, y);
  CHECK(fit.limit == doctest::Approx(0.1).epsilon(1e-8));
}

TEST_CASE("fits reject malformed input") {
  const std::vector<double> x{1.0, 2.0}, y{1.0, 2.0};
  CHECK_THROWS(fit_constant_plus_power(x, y));
  const std::vector<double> xs{3.0, 2.0, 1.0}, ys{1.0, 1.0, 1.0};
  CHECK_THROWS(fit_constant_plus_power(xs, ys));
}

TEST_CASE("monotone root finders hit their targets") {
  auto f = [](double x) { return std::exp(-x); };
  const auto r = solve_decreasing(f, 0.3, 0.0, 10.0, f(0.0), f(10.0), 1e-14);
  CHECK(std::exp(-r.root) == doctest::Approx(0.3).epsilon(1e-13));
  const double gap = solve_gap([](double g) { return 1.0 / g + 1.0 / (g * g); }, 10100.0, 1.0, 1e-14);
  CHECK(gap == doctest::Approx(0.01).epsilon(1e-12));
  const double s = solve_increasing([](double x) { return x * x * x + x; }, 10.0, 0.0, 0.5, 1e-14);
  CHECK(s * s * s + s == doctest::Approx(10.0).epsilon(1e-13));
}

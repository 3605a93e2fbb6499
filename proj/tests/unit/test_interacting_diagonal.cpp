#include <doctest.h>

#include <cmath>
#include <vector>

#include "qavg/interacting_diagonal.hpp"

using namespace qavg;

namespace {

// Direct single-mode sums in long double, for modest occupations only.
struct DirectMode {
  long double z = 0.0L, n = 0.0L, n2 = 0.0L;
};

DirectMode direct_mode(double e, double beta, double mu, double a, double v, int terms) {
  DirectMode d;
  for (int k = 0; k < terms; ++k) {
    const long double w = std::exp(-static_cast<long double>(beta) *
                                   ((e - mu) * k + a / (2.0L * v) * k * (k - 1.0L)));
    d.z += w;
    d.n += w * k;
    d.n2 += w * k * k;
  }
  return d;
}

}  // namespace

TEST_CASE("single-mode statistics agree with direct summation") {
  for (double mu : {-0.5, 0.01, 0.3}) {
    CAPTURE(mu);
    const auto s = mode_statistics(0.02, 1.0, mu, 1.0, 100.0);
    const auto d = direct_mode(0.02, 1.0, mu, 1.0, 100.0, 4000);
    const double mean = static_cast<double>(d.n / d.z);
    const double var = static_cast<double>(d.n2 / d.z - (d.n / d.z) * (d.n / d.z));
    CHECK(s.mean_occupation == doctest::Approx(mean).epsilon(1e-12));
    CHECK(s.occupation_variance == doctest::Approx(var).epsilon(1e-9));
    CHECK(s.log_partition == doctest::Approx(static_cast<double>(std::log(d.z))).epsilon(1e-12));
  }
}

TEST_CASE("vanishing coupling reproduces ideal occupations") {
  for (double e : {0.0, 1e-3, 0.1, 2.0}) {
    for (double mu : {-1e-3, -0.05, -1.0}) {
      const double ideal = bose_occupation(1.0, e, mu);
      double previous = 1e300;
      for (double a : {1e-6, 1e-9, 1e-12}) {
        const double n = mode_statistics(e, 1.0, mu, a, 1e3).mean_occupation;
        const double error = std::abs(n - ideal) / std::max(ideal, 1.0);
        CHECK(error <= previous);
        previous = std::max(error, 1e-15);
      }
      CHECK(previous <= 1e-6);
    }
  }
}

TEST_CASE("occupation grows with mu and stays finite above the spectrum bottom") {
  double last = -1.0;
  for (double mu : {-1.0, -0.01, 0.0, 0.01, 0.1}) {
    const double n = mode_statistics(0.0, 1.0, mu, 1.0, 1e4).mean_occupation;
    CHECK(std::isfinite(n));
    CHECK(n > last);
    last = n;
  }
  // Deep in the condensed regime the mean sits near V mu / a.
  CHECK(mode_statistics(0.0, 1.0, 0.1, 1.0, 1e4).mean_occupation ==
        doctest::Approx(1e4 * 0.1 + 0.5).epsilon(1e-3));
}

TEST_CASE("density equation residual") {
  const DiagonalModel model(1.0, BoxGeometry::elongated(1e5, 0.6));
  const double rho = critical_density(1.0) + 0.1;
  const double mu = solve_mu_interacting(model, 1.0, rho);
  CHECK(std::abs(interacting_density(model, 1.0, mu) - rho) < 1e-10 * rho);
  CHECK(mu > 0.0);
}

TEST_CASE("row-accelerated density matches the mode enumeration") {
  const DiagonalModel model(1.0, BoxGeometry::elongated(1e4, 0.6));
  for (double mu : {-0.01, 0.002}) {
    double enumerated = 0.0;
    for (const auto& m : enumerate_modes(model.geometry, std::max(mu, 0.0) + 50.0)) {
      enumerated += mode_statistics(m.energy, 1.0, mu, 1.0, 1e4).mean_occupation;
    }
    CHECK(interacting_density(model, 1.0, mu) ==
          doctest::Approx(enumerated / 1e4).epsilon(1e-12));
  }
}

TEST_CASE("coupling must be positive") {
  CHECK_THROWS_AS(DiagonalModel(0.0, BoxGeometry::cubic(10.0)), DomainError);
  CHECK_THROWS_AS(mode_statistics(0.0, 1.0, 0.0, -1.0, 10.0), DomainError);
}

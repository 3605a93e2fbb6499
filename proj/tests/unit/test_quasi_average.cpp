#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "qavg/quasi_average.hpp"

using namespace qavg;

namespace {

LimitSchedule small_schedule() {
  LimitSchedule s;
  s.volumes = geometric_schedule(1e5, 10.0, 5);
  for (int m = 0; m < 5; ++m) s.amplitudes.push_back(1e-2 * std::pow(0.5, m));
  return s;
}

}  // namespace

TEST_CASE("source field normalizes its phase and validates its amplitude") {
  const SourceField a(0.1, -kPi / 2);
  CHECK(a.phase == doctest::Approx(1.5 * kPi));
  CHECK(SourceField(0.1, 2.0 * kPi).phase == doctest::Approx(0.0));
  CHECK_THROWS_AS(SourceField(-0.1, 0.0), DomainError);
  const auto b = SourceField::from_complex({0.3, -0.4});
  CHECK(b.amplitude == doctest::Approx(0.5));
  CHECK(std::abs(b.value() - std::complex<double>(0.3, -0.4)) < 1e-15);
}

TEST_CASE("fixed momentum selects the nearest lattice mode") {
  const auto g = BoxGeometry::cubic(1000.0);
  SourceField src(0.1, 0.0);
  const double s = spacings(g)[0];
  src.fixed_momentum = std::array<double, 3>{2.2 * s, 0.0, -0.9 * s};
  CHECK(selected_mode(g, src) == ModeIndex{2, 0, -1});
}

TEST_CASE("source term and sourced density") {
  const auto g = BoxGeometry::elongated(1e4, 0.6);
  const double mu = -0.02;
  const SourceField src(0.01, 1.0);
  CHECK(source_term(g, mu, src) == doctest::Approx(0.01 * 0.01 / (mu * mu)).epsilon(1e-15));
  CHECK(sourced_density(g, 1.0, mu, src) ==
        doctest::Approx(finite_volume_density(g, 1.0, mu) + 0.25).epsilon(1e-14));
  CHECK(selected_mode_density(g, 1.0, mu, src) ==
        doctest::Approx(bose_occupation(1.0, 0.0, mu) / g.volume() + 0.25).epsilon(1e-14));
  CHECK_THROWS_AS(sourced_density(g, 1.0, 0.0, src), DomainError);
}

TEST_CASE("sourced density equation: finite and infinite volume roots") {
  const auto g = BoxGeometry::elongated(1e6, 0.6);
  const double rho = critical_density(1.0) + 0.25;
  const SourceField src(1e-3, 0.0);
  const double mu = solve_mu_sourced(g, 1.0, rho, src);
  CHECK(mu < 0.0);
  CHECK(std::abs(sourced_density(g, 1.0, mu, src) - rho) <= kDensityRootTolerance * rho);
  CHECK(solve_mu_sourced(g, 1.0, rho, SourceField(0.0, 0.0)) == solve_mu(g, 1.0, rho));

  const double mu_inf = solve_mu_sourced_infinite(1.0, rho, 1e-3);
  CHECK(infinite_volume_density(1.0, mu_inf) + 1e-6 / (mu_inf * mu_inf) ==
        doctest::Approx(rho).epsilon(1e-11));
  // Leading small-source law: mu ~ -lambda / sqrt(rho - rho_c).
  CHECK(mu_inf / 1e-3 == doctest::Approx(-2.0).epsilon(0.02));
}

TEST_CASE("pressure derivative in the source: analytic against finite differences") {
  const auto g = BoxGeometry::cubic(1e3);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double mu = -std::pow(10.0, -3.0 + 3.0 * u(rng));
    const SourceField src(std::pow(10.0, -3.0 + 2.0 * u(rng)), 2.0 * kPi * u(rng));
    const auto analytic = pressure_wirtinger(mu, src);
    CHECK(std::abs(analytic + std::conj(src.value()) / mu) < 1e-15 * std::abs(analytic));
    const auto numeric = pressure_wirtinger_numeric(g, 1.0, mu, src, 1e-4 * src.amplitude);
    CHECK(std::abs(numeric - analytic) <= 1e-6 * std::abs(analytic));
  }
}

TEST_CASE("pressure is convex in the source amplitude") {
  const auto g = BoxGeometry::cubic(1e3);
  for (double mu : {-1.0, -0.1, -1e-3}) {
    const double h = 1e-3;
    for (double a : {0.01, 0.05, 0.2}) {
      const double second = pressure(g, 1.0, mu, SourceField(a + h, 0.3)) -
                            2.0 * pressure(g, 1.0, mu, SourceField(a, 0.3)) +
                            pressure(g, 1.0, mu, SourceField(a - h, 0.3));
      CHECK(second >= -1e-10);
    }
  }
}

TEST_CASE("schedule validation") {
  auto s = LimitSchedule::standard();
  CHECK_NOTHROW(s.validate());
  s.volumes = {1e3, 1e4, 1e4, 1e5};
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = LimitSchedule::standard();
  s.amplitudes = {1e-2, 2e-2, 1e-3, 1e-4};
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = LimitSchedule::standard();
  s.volumes.resize(3);
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("quasi-average rotates with the source phase and nothing else changes") {
  const double rho = critical_density(1.0) + 0.25;
  const auto s = small_schedule();
  const auto a = run_quasi_average(0.6, 1.0, rho, 0.0, s);
  const auto b = run_quasi_average(0.6, 1.0, rho, kPi / 3, s);
  CHECK(std::abs(a.ssb_parameter) == doctest::Approx(std::abs(b.ssb_parameter)).epsilon(1e-14));
  CHECK(std::arg(b.ssb_parameter) == doctest::Approx(kPi / 3).epsilon(1e-12));
  CHECK(a.bec_density == b.bec_density);
  CHECK(a.odlro_density == b.odlro_density);
  CHECK(a.mu_trace.size() == s.volumes.size() * (s.amplitudes.size() + 1));
  // Without a source the selected mode holds nothing in the limit.
  CHECK(a.unsourced_selected_density < 1e-3);
  CHECK(a.offmode_max < 1e-4);
}

TEST_CASE("the small-source law needs a supercritical density") {
  CHECK_THROWS_AS(lemma41_check(1.0, 0.5 * critical_density(1.0), small_schedule()), DomainError);
}

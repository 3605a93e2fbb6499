#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "qavg/errors.hpp"
#include "qavg/spin_ferromagnet.hpp"

using namespace qavg;

namespace {

// Gibbs average of an operator from a full diagonalization of H.
double dense_average(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& op, double beta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  const Eigen::VectorXd e = solver.eigenvalues();
  const Eigen::VectorXd w = (-beta * (e.array() - e.minCoeff())).exp();
  const Eigen::MatrixXcd& v = solver.eigenvectors();
  const Eigen::MatrixXcd rotated = v.adjoint() * op * v;
  return (rotated.diagonal().real().array() * w.array()).sum() / w.sum();
}

// Two sites, one bond: triplet at -1 - 2 B m (m = 1, 0, -1), singlet at +3.
struct PairOracle {
  double m, energy_per_site, odlro;
};

PairOracle pair_oracle(double beta, double b) {
  const double up = std::exp(beta * (1.0 + 2.0 * b)), flat = std::exp(beta),
               down = std::exp(beta * (1.0 - 2.0 * b)), singlet = std::exp(-3.0 * beta);
  const double z = up + flat + down + singlet;
  const double energy = ((-1.0 - 2.0 * b) * up - flat + (-1.0 + 2.0 * b) * down + 3.0 * singlet) / z;
  const double z0 = 3.0 * std::exp(beta) + singlet;
  return {(up - down) / z, energy / 2.0, 2.0 * 3.0 * std::exp(beta) / z0};
}

}  // namespace

TEST_CASE("lattice construction and bond counting") {
  CHECK(SpinLattice::chain(2).bonds().size() == 1);
  CHECK(SpinLattice::chain(4).bonds().size() == 4);
  CHECK(SpinLattice({2, 2}).bonds().size() == 4);
  CHECK(SpinLattice({3, 2}).bonds().size() == 9);
  CHECK(SpinLattice::chain(5).hilbert_dimension() == 32);
  CHECK_THROWS_AS(SpinLattice::chain(13), ResourceLimitError);
  CHECK_THROWS_AS(SpinLattice({0, 2}), DomainError);
  CHECK_THROWS_AS(FieldSpec(1.0, {1.0, 1.0, 0.0}), DomainError);
}

TEST_CASE("two-site magnetization and ODLRO moment match the closed form") {
  const auto lattice = SpinLattice::chain(2);
  for (double beta : {0.3, 1.0, 2.5}) {
    for (double b : {0.0, 0.1, 0.7}) {
      CAPTURE(beta);
      CAPTURE(b);
      const auto oracle = pair_oracle(beta, b);
      const Vec3 n{1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0};
      for (const Vec3& dir : {Vec3{0.0, 0.0, 1.0}, n}) {
        const auto s = thermal_expectations(lattice, FieldSpec(b, dir), beta);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(s.magnetization[k] - oracle.m * dir[k]) < 1e-12);
        CHECK(std::abs(s.energy_per_site - oracle.energy_per_site) < 1e-12);
      }
      CHECK(std::abs(odlro_moment(lattice, beta) - oracle.odlro) < 1e-12);
    }
  }
}

TEST_CASE("Hamiltonian is Hermitian and conserves total sigma^z for a z field") {
  const auto lattice = SpinLattice::chain(4);
  const auto h = build_hamiltonian(lattice, FieldSpec(0.3, {0.0, 0.0, 1.0}));
  CHECK((h - h.adjoint()).norm() < 1e-14);
  const auto sz = total_spin_operator(lattice, 2);
  CHECK((h * sz - sz * h).norm() < 1e-12);
  const auto tilted = build_hamiltonian(lattice, FieldSpec(0.3, {0.6, 0.0, 0.8}));
  CHECK((tilted * sz - sz * tilted).norm() > 1e-3);
}

TEST_CASE("sector and dense routes agree with a brute-force Gibbs average") {
  for (int n : {3, 4, 6}) {
    const auto lattice = SpinLattice::chain(n);
    for (const Vec3& dir : {Vec3{0.0, 0.0, 1.0}, Vec3{0.0, 0.0, -1.0}, Vec3{0.6, 0.0, 0.8}}) {
      const FieldSpec field(0.2, dir);
      const auto state = thermal_expectations(lattice, field, 1.5);
      const auto h = build_hamiltonian(lattice, field);
      for (int axis = 0; axis < 3; ++axis) {
        const double ref = dense_average(h, total_spin_operator(lattice, axis), 1.5) / n;
        CHECK(std::abs(state.magnetization[axis] - ref) < 1e-12);
      }
      CHECK(std::abs(state.energy_per_site - dense_average(h, h, 1.5) / n) < 1e-11);
    }
  }
}

TEST_CASE("ODLRO moment equals the Gibbs average of the squared total spin") {
  const auto lattice = SpinLattice({2, 2});
  const auto h = build_hamiltonian(lattice, FieldSpec());
  Eigen::MatrixXcd square = Eigen::MatrixXcd::Zero(16, 16);
  for (int axis = 0; axis < 3; ++axis) {
    const auto s = total_spin_operator(lattice, axis);
    square += s * s;
  }
  CHECK(std::abs(odlro_moment(lattice, 0.8) - dense_average(h, square, 0.8) / 16.0) < 1e-12);
}

TEST_CASE("zero field gives zero magnetization up to ten sites") {
  for (int n = 2; n <= 10; ++n) {
    const auto s = thermal_expectations(SpinLattice::chain(n), FieldSpec(), 2.0);
    for (double m : s.magnetization) CHECK(std::abs(m) < 1e-13);
  }
}

TEST_CASE("rotating the field rotates the magnetization") {
  const auto lattice = SpinLattice::chain(4);
  const auto r = rotation_matrix({0.0, 0.6, 0.8}, 1.1);
  const auto report = rotation_covariance_check(lattice, 1.0, 0.25, {0.0, 0.0, 1.0}, r);
  CHECK(report.covariant);
  CHECK(report.max_deviation < 1e-10);
  Mat3 reflection{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, -1.0}}};
  CHECK_THROWS_AS(rotation_covariance_check(lattice, 1.0, 0.25, {0.0, 0.0, 1.0}, reflection),
                  DomainError);
}

TEST_CASE("limit-order study: field and size trends") {
  const auto study = limit_order_study(2.0, {0.1, 0.05, 0.0}, {2, 4, 6});
  CHECK(study.rows.size() == 9);
  CHECK(study.vanishes_with_field);
  CHECK(study.increases_with_size);
  CHECK_FALSE(study.limit_claimed);
}

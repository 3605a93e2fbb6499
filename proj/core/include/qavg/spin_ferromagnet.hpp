#pragma once

// Exact diagonalization of the spin-1/2 isotropic Heisenberg ferromagnet on a
// periodic lattice,
//   H = - sum_<x,y> sigma_x . sigma_y - B n . sum_x sigma_x,
// with Pauli matrices sigma and every nearest-neighbour bond counted once.

#include <array>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qavg {

inline constexpr std::size_t kDefaultMaxSites = 12;

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

class SpinLattice {
 public:
  /// Periodic lattice with the given extent per axis. Throws DomainError for
  /// empty or non-positive extents and ResourceLimitError above max_sites.
  explicit SpinLattice(std::vector<int> dimensions, std::size_t max_sites = kDefaultMaxSites);
  static SpinLattice chain(int sites, std::size_t max_sites = kDefaultMaxSites);

  const std::vector<int>& dimensions() const noexcept { return dimensions_; }
  std::size_t site_count() const noexcept { return sites_; }
  std::size_t hilbert_dimension() const noexcept { return std::size_t{1} << sites_; }
  /// Distinct nearest-neighbour pairs (x < y).
  const std::vector<std::pair<int, int>>& bonds() const noexcept { return bonds_; }

 private:
  std::vector<int> dimensions_;
  std::size_t sites_ = 0;
  std::vector<std::pair<int, int>> bonds_;
};

struct FieldSpec {
  FieldSpec() = default;
  /// Throws DomainError unless magnitude >= 0 and |direction| = 1 within 1e-12.
  FieldSpec(double magnitude, Vec3 direction);

  double magnitude = 0.0;
  Vec3 direction{0.0, 0.0, 1.0};
};

/// Dense 2^N x 2^N Hamiltonian in the sigma^z product basis (bit j set means
/// site j points up).
Eigen::MatrixXcd build_hamiltonian(const SpinLattice& lattice, const FieldSpec& field);

/// sum_x sigma^axis_x as a dense matrix; axis 0, 1, 2 = x, y, z.
Eigen::MatrixXcd total_spin_operator(const SpinLattice& lattice, int axis);

struct ThermalState {
  Vec3 magnetization{};  // (1/N) <sum_x sigma_x>
  double energy_per_site = 0.0;
};

/// Gibbs expectations. Fields along +-z (or zero) use the conserved total
/// sigma^z to block-diagonalize in real arithmetic; any other direction goes
/// through a dense complex Hermitian eigensolver.
ThermalState thermal_expectations(const SpinLattice& lattice, const FieldSpec& field, double beta);

/// <|(1/N) sum_x sigma_x|^2> in the zero-field Gibbs state.
double odlro_moment(const SpinLattice& lattice, double beta);

/// 3x3 rotation about a unit axis.
Mat3 rotation_matrix(const Vec3& axis, double angle);
Vec3 apply(const Mat3& rotation, const Vec3& v);

struct RotationReport {
  Vec3 rotated_field_magnetization{};  // m(R n)
  Vec3 rotated_magnetization{};        // R m(n)
  double max_deviation = 0.0;
  bool covariant = false;
};

/// Compares m(field along R n) with R m(field along n). Throws DomainError
/// unless R is a proper rotation within 1e-12.
RotationReport rotation_covariance_check(const SpinLattice& lattice, double beta, double magnitude,
                                         const Vec3& direction, const Mat3& rotation,
                                         double tolerance = 1e-10);

struct LimitOrderRow {
  int sites = 0;
  double beta = 0.0;
  double field = 0.0;
  Vec3 magnetization{};
  double energy_per_site = 0.0;
};

struct LimitOrderStudy {
  std::vector<LimitOrderRow> rows;  // sites major, fields minor, input order
  /// For each chain length, |m_z| shrinks monotonically along the field
  /// sequence sorted towards zero, and vanishes at zero field.
  bool vanishes_with_field = false;
  /// For each positive field, m_z increases with the chain length.
  bool increases_with_size = false;
  /// Finite-size trends only; no thermodynamic limit is extrapolated.
  bool limit_claimed = false;
};

LimitOrderStudy limit_order_study(double beta, const std::vector<double>& fields,
                                  const std::vector<int>& chain_lengths,
                                  std::size_t max_sites = kDefaultMaxSites);

}  // namespace qavg

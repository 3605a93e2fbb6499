#include "qavg/spin_ferromagnet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>

#include "qavg/errors.hpp"
#include "qavg/parallel.hpp"

namespace qavg {

namespace {

using State = std::uint32_t;

int popcount(State s) { return std::popcount(s); }

bool bit(State s, int j) { return (s >> j) & 1u; }

State swap_bits(State s, int x, int y) {
  if (bit(s, x) == bit(s, y)) return s;
  return s ^ ((State{1} << x) | (State{1} << y));
}

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("inverse temperature must be positive and finite");
  }
}

bool along_z(const FieldSpec& field) {
  return field.magnitude == 0.0 || (field.direction[0] == 0.0 && field.direction[1] == 0.0);
}

// Fixed-magnetization sectors: states with u up spins, u = 0..N.
struct Sectors {
  std::vector<std::vector<State>> states;
  std::vector<std::size_t> position;  // index of a state inside its sector
};

Sectors build_sectors(std::size_t sites) {
  Sectors sec;
  const std::size_t dim = std::size_t{1} << sites;
  sec.states.resize(sites + 1);
  sec.position.resize(dim);
  for (State s = 0; s < dim; ++s) {
    auto& block = sec.states[popcount(s)];
    sec.position[s] = block.size();
    block.push_back(s);
  }
  return sec;
}

// Real symmetric block of H at fixed number of up spins. `field_z` is B n_z.
Eigen::MatrixXd sector_hamiltonian(const SpinLattice& lattice, const Sectors& sec, int up,
                                   double field_z) {
  const auto& states = sec.states[up];
  const auto d = static_cast<Eigen::Index>(states.size());
  const double zeeman = -field_z * (2.0 * up - static_cast<double>(lattice.site_count()));
  Eigen::MatrixXd h = Eigen::MatrixXd::Constant(d, d, 0.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    const State s = states[i];
    h(i, i) += zeeman;
    for (const auto& [x, y] : lattice.bonds()) {
      // -sigma_x . sigma_y = -(2 P_xy - 1)
      if (bit(s, x) == bit(s, y)) {
        h(i, i) -= 1.0;
      } else {
        h(i, i) += 1.0;
        h(static_cast<Eigen::Index>(sec.position[swap_bits(s, x, y)]), i) -= 2.0;
      }
    }
  }
  return h;
}

struct Spectrum {
  std::vector<Eigen::VectorXd> energies;  // per sector
  std::vector<Eigen::MatrixXd> vectors;
  double ground = std::numeric_limits<double>::infinity();
};

Spectrum sector_spectrum(const SpinLattice& lattice, const Sectors& sec, double field_z,
                         bool want_vectors) {
  const std::size_t n = lattice.site_count();
  Spectrum sp;
  sp.energies.resize(n + 1);
  sp.vectors.resize(n + 1);
  parallel_for(n + 1, [&](std::size_t up) {
    const Eigen::MatrixXd h = sector_hamiltonian(lattice, sec, static_cast<int>(up), field_z);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        h, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    sp.energies[up] = solver.eigenvalues();
    if (want_vectors) sp.vectors[up] = solver.eigenvectors();
  });
  for (const auto& e : sp.energies) sp.ground = std::min(sp.ground, e.minCoeff());
  return sp;
}

ThermalState block_expectations(const SpinLattice& lattice, const FieldSpec& field, double beta) {
  const std::size_t n = lattice.site_count();
  const Sectors sec = build_sectors(n);
  const double field_z = field.magnitude * field.direction[2];
  const Spectrum sp = sector_spectrum(lattice, sec, field_z, false);
  double z = 0.0, mz = 0.0, energy = 0.0;
  for (std::size_t up = 0; up <= n; ++up) {
    const double moment = 2.0 * static_cast<double>(up) - static_cast<double>(n);
    for (Eigen::Index i = 0; i < sp.energies[up].size(); ++i) {
      const double e = sp.energies[up][i];
      const double w = std::exp(-beta * (e - sp.ground));
      z += w;
      mz += w * moment;
      energy += w * e;
    }
  }
  ThermalState out;
  out.magnetization = {0.0, 0.0, mz / (z * static_cast<double>(n))};
  out.energy_per_site = energy / (z * static_cast<double>(n));
  return out;
}

ThermalState dense_expectations(const SpinLattice& lattice, const FieldSpec& field, double beta) {
  const std::size_t n = lattice.site_count();
  const auto dim = static_cast<Eigen::Index>(lattice.hilbert_dimension());
  const Eigen::MatrixXcd h = build_hamiltonian(lattice, field);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  const Eigen::VectorXd& e = solver.eigenvalues();
  const Eigen::MatrixXcd& v = solver.eigenvectors();
  const double ground = e.minCoeff();

  Eigen::VectorXd w(dim);
  for (Eigen::Index i = 0; i < dim; ++i) w[i] = std::exp(-beta * (e[i] - ground));
  const double z = w.sum();

  const std::complex<double> I(0.0, 1.0);
  std::vector<std::array<double, 4>> parts(static_cast<std::size_t>(dim));
  parallel_for(static_cast<std::size_t>(dim), [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx);
    auto& out = parts[idx];
    out = {0.0, 0.0, 0.0, 0.0};
    if (w[i] / z < 1e-20) return;
    std::complex<double> sx = 0.0, sy = 0.0;
    double sz = 0.0;
    for (State s = 0; s < static_cast<State>(dim); ++s) {
      const std::complex<double> amp = v(s, i);
      if (amp == 0.0) continue;
      sz += std::norm(amp) * (2.0 * popcount(s) - static_cast<double>(n));
      for (std::size_t j = 0; j < n; ++j) {
        const State t = s ^ (State{1} << j);
        const std::complex<double> left = std::conj(v(t, i));
        sx += left * amp;
        sy += left * (bit(s, static_cast<int>(j)) ? I : -I) * amp;
      }
    }
    out = {w[i] * sx.real(), w[i] * sy.real(), w[i] * sz, w[i] * e[i]};
  });
  std::array<double, 4> total{0.0, 0.0, 0.0, 0.0};
  for (const auto& p : parts) {
    for (int k = 0; k < 4; ++k) total[k] += p[k];
  }
  const double norm = z * static_cast<double>(n);
  ThermalState out;
  out.magnetization = {total[0] / norm, total[1] / norm, total[2] / norm};
  out.energy_per_site = total[3] / norm;
  return out;
}

}  // namespace

SpinLattice::SpinLattice(std::vector<int> dimensions, std::size_t max_sites)
    : dimensions_(std::move(dimensions)) {
  if (dimensions_.empty()) throw DomainError("lattice needs at least one axis");
  std::size_t sites = 1;
  for (int d : dimensions_) {
    if (d < 1) throw DomainError("lattice extents must be positive");
    sites *= static_cast<std::size_t>(d);
    if (sites > max_sites || sites > 30) {
      throw ResourceLimitError("lattice exceeds the site cap of " + std::to_string(max_sites));
    }
  }
  sites_ = sites;

  std::set<std::pair<int, int>> bonds;
  std::vector<int> coord(dimensions_.size());
  for (std::size_t x = 0; x < sites_; ++x) {
    std::size_t rest = x;
    for (std::size_t a = 0; a < dimensions_.size(); ++a) {
      coord[a] = static_cast<int>(rest % static_cast<std::size_t>(dimensions_[a]));
      rest /= static_cast<std::size_t>(dimensions_[a]);
    }
    std::size_t stride = 1;
    for (std::size_t a = 0; a < dimensions_.size(); ++a) {
      const int d = dimensions_[a];
      if (d > 1) {
        const int next = (coord[a] + 1) % d;
        const auto y = static_cast<int>(x + (next - coord[a]) * static_cast<long>(stride));
        bonds.insert({std::min(static_cast<int>(x), y), std::max(static_cast<int>(x), y)});
      }
      stride *= static_cast<std::size_t>(d);
    }
  }
  bonds_.assign(bonds.begin(), bonds.end());
}

SpinLattice SpinLattice::chain(int sites, std::size_t max_sites) {
  return SpinLattice({sites}, max_sites);
}

FieldSpec::FieldSpec(double magnitude_, Vec3 direction_)
    : magnitude(magnitude_), direction(direction_) {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw DomainError("field magnitude must be finite and non-negative");
  }
  const double norm = std::sqrt(direction[0] * direction[0] + direction[1] * direction[1] +
                                direction[2] * direction[2]);
  if (!(std::abs(norm - 1.0) <= 1e-12)) throw DomainError("field direction must be a unit vector");
}

Eigen::MatrixXcd build_hamiltonian(const SpinLattice& lattice, const FieldSpec& field) {
  const std::size_t n = lattice.site_count();
  const auto dim = static_cast<Eigen::Index>(lattice.hilbert_dimension());
  const std::complex<double> I(0.0, 1.0);
  const double bx = field.magnitude * field.direction[0];
  const double by = field.magnitude * field.direction[1];
  const double bz = field.magnitude * field.direction[2];
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (State s = 0; s < static_cast<State>(dim); ++s) {
    h(s, s) += -bz * (2.0 * popcount(s) - static_cast<double>(n));
    for (const auto& [x, y] : lattice.bonds()) {
      if (bit(s, x) == bit(s, y)) {
        h(s, s) -= 1.0;
      } else {
        h(s, s) += 1.0;
        h(swap_bits(s, x, y), s) -= 2.0;
      }
    }
    if (bx != 0.0 || by != 0.0) {
      for (std::size_t j = 0; j < n; ++j) {
        const State t = s ^ (State{1} << j);
        h(t, s) += -bx - by * (bit(s, static_cast<int>(j)) ? I : -I);
      }
    }
  }
  return h;
}

Eigen::MatrixXcd total_spin_operator(const SpinLattice& lattice, int axis) {
  if (axis < 0 || axis > 2) throw DomainError("spin axis must be 0, 1 or 2");
  const std::size_t n = lattice.site_count();
  const auto dim = static_cast<Eigen::Index>(lattice.hilbert_dimension());
  const std::complex<double> I(0.0, 1.0);
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
  for (State s = 0; s < static_cast<State>(dim); ++s) {
    if (axis == 2) {
      op(s, s) = 2.0 * popcount(s) - static_cast<double>(n);
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const State t = s ^ (State{1} << j);
      op(t, s) += axis == 0 ? std::complex<double>(1.0)
                            : (bit(s, static_cast<int>(j)) ? I : -I);
    }
  }
  return op;
}

ThermalState thermal_expectations(const SpinLattice& lattice, const FieldSpec& field,
                                  double beta) {
  require_beta(beta);
  return along_z(field) ? block_expectations(lattice, field, beta)
                        : dense_expectations(lattice, field, beta);
}

double odlro_moment(const SpinLattice& lattice, double beta) {
  require_beta(beta);
  const std::size_t n = lattice.site_count();
  const Sectors sec = build_sectors(n);
  const Spectrum sp = sector_spectrum(lattice, sec, 0.0, true);

  // (sum sigma)^2 = 3N - N(N-1) + 4 sum_{x<y} P_xy, with P_xy the site swap.
  std::vector<std::array<double, 2>> parts(n + 1);
  parallel_for(n + 1, [&](std::size_t up) {
    const auto& states = sec.states[up];
    const Eigen::MatrixXd& vec = sp.vectors[up];
    double z = 0.0, swaps = 0.0;
    for (Eigen::Index i = 0; i < vec.cols(); ++i) {
      const double w = std::exp(-beta * (sp.energies[up][i] - sp.ground));
      z += w;
      if (w == 0.0) continue;
      double expect = 0.0;
      for (std::size_t a = 0; a < states.size(); ++a) {
        const double amp = vec(static_cast<Eigen::Index>(a), i);
        if (amp == 0.0) continue;
        for (std::size_t x = 0; x < n; ++x) {
          for (std::size_t y = x + 1; y < n; ++y) {
            const State t = swap_bits(states[a], static_cast<int>(x), static_cast<int>(y));
            expect += amp * vec(static_cast<Eigen::Index>(sec.position[t]), i);
          }
        }
      }
      swaps += w * expect;
    }
    parts[up] = {z, swaps};
  });
  double z = 0.0, swaps = 0.0;
  for (const auto& p : parts) {
    z += p[0];
    swaps += p[1];
  }
  const double nn = static_cast<double>(n);
  return (3.0 * nn - nn * (nn - 1.0) + 4.0 * swaps / z) / (nn * nn);
}

Mat3 rotation_matrix(const Vec3& axis, double angle) {
  const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (!(norm > 0.0)) throw DomainError("rotation axis must be nonzero");
  const double x = axis[0] / norm, y = axis[1] / norm, z = axis[2] / norm;
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  return Mat3{Vec3{t * x * x + c, t * x * y - s * z, t * x * z + s * y},
              Vec3{t * x * y + s * z, t * y * y + c, t * y * z - s * x},
              Vec3{t * x * z - s * y, t * y * z + s * x, t * z * z + c}};
}

Vec3 apply(const Mat3& r, const Vec3& v) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i) out[i] = r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
  return out;
}

RotationReport rotation_covariance_check(const SpinLattice& lattice, double beta, double magnitude,
                                         const Vec3& direction, const Mat3& rotation,
                                         double tolerance) {
  double det = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += rotation[k][i] * rotation[k][j];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-12) {
        throw DomainError("rotation matrix is not orthogonal");
      }
    }
  }
  det = rotation[0][0] * (rotation[1][1] * rotation[2][2] - rotation[1][2] * rotation[2][1]) -
        rotation[0][1] * (rotation[1][0] * rotation[2][2] - rotation[1][2] * rotation[2][0]) +
        rotation[0][2] * (rotation[1][0] * rotation[2][1] - rotation[1][1] * rotation[2][0]);
  if (std::abs(det - 1.0) > 1e-12) throw DomainError("rotation matrix must have determinant 1");

  Vec3 rotated_direction = apply(rotation, direction);
  const double norm = std::sqrt(rotated_direction[0] * rotated_direction[0] +
                                rotated_direction[1] * rotated_direction[1] +
                                rotated_direction[2] * rotated_direction[2]);
  for (double& c : rotated_direction) c /= norm;

  RotationReport report;
  const auto base = thermal_expectations(lattice, FieldSpec(magnitude, direction), beta);
  const auto turned = thermal_expectations(lattice, FieldSpec(magnitude, rotated_direction), beta);
  report.rotated_field_magnetization = turned.magnetization;
  report.rotated_magnetization = apply(rotation, base.magnetization);
  for (int i = 0; i < 3; ++i) {
    report.max_deviation =
        std::max(report.max_deviation,
                 std::abs(report.rotated_field_magnetization[i] - report.rotated_magnetization[i]));
  }
  report.covariant = report.max_deviation <= tolerance;
  return report;
}

LimitOrderStudy limit_order_study(double beta, const std::vector<double>& fields,
                                  const std::vector<int>& chain_lengths, std::size_t max_sites) {
  require_beta(beta);
  if (fields.empty() || chain_lengths.empty()) {
    throw DomainError("limit-order study needs fields and chain lengths");
  }
  for (double b : fields) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("fields must be non-negative");
  }
  for (int n : chain_lengths) SpinLattice::chain(n, max_sites);

  LimitOrderStudy study;
  const std::size_t nf = fields.size();
  study.rows.resize(chain_lengths.size() * nf);
  for (std::size_t c = 0; c < study.rows.size(); ++c) {
    const int sites = chain_lengths[c / nf];
    const double b = fields[c % nf];
    const auto state =
        thermal_expectations(SpinLattice::chain(sites, max_sites), FieldSpec(b, {0, 0, 1}), beta);
    study.rows[c] = {sites, beta, b, state.magnetization, state.energy_per_site};
  }

  auto mz = [&](std::size_t ni, std::size_t fi) { return study.rows[ni * nf + fi].magnetization[2]; };

  std::vector<std::size_t> by_field(nf);
  for (std::size_t i = 0; i < nf; ++i) by_field[i] = i;
  std::sort(by_field.begin(), by_field.end(),
            [&](std::size_t a, std::size_t b) { return fields[a] > fields[b]; });
  study.vanishes_with_field = true;
  for (std::size_t ni = 0; ni < chain_lengths.size(); ++ni) {
    for (std::size_t k = 1; k < nf; ++k) {
      if (std::abs(mz(ni, by_field[k])) > std::abs(mz(ni, by_field[k - 1]))) {
        study.vanishes_with_field = false;
      }
    }
    for (std::size_t fi = 0; fi < nf; ++fi) {
      if (fields[fi] == 0.0 && std::abs(mz(ni, fi)) > 1e-13) study.vanishes_with_field = false;
    }
  }

  std::vector<std::size_t> by_size(chain_lengths.size());
  for (std::size_t i = 0; i < by_size.size(); ++i) by_size[i] = i;
  std::sort(by_size.begin(), by_size.end(),
            [&](std::size_t a, std::size_t b) { return chain_lengths[a] < chain_lengths[b]; });
  study.increases_with_size = true;
  for (std::size_t fi = 0; fi < nf; ++fi) {
    if (fields[fi] == 0.0) continue;
    for (std::size_t k = 1; k < by_size.size(); ++k) {
      if (!(mz(by_size[k], fi) > mz(by_size[k - 1], fi))) study.increases_with_size = false;
    }
  }
  study.limit_claimed = false;
  return study;
}

}  // namespace qavg

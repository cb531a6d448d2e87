#pragma once

// Chain geometries, coupling models and Hamiltonian construction.
//
// Sites are addressed two ways: lattice positions (1-based integers, unit =
// lattice constant a) and site indices (0-based indices into the list of
// occupied positions). Matrices are always indexed by site index.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinchain/errors.hpp"
#include "spinchain/linalg.hpp"

namespace spinchain {

/// Occupied lattice positions plus the sender/receiver designation.
class ChainGeometry {
public:
  ChainGeometry(std::vector<int> positions, int sender_pos, int receiver_pos)
      : positions_(std::move(positions)), sender_pos_(sender_pos), receiver_pos_(receiver_pos) {
    if (positions_.size() < 2) throw std::invalid_argument("ChainGeometry: need at least 2 sites");
    for (std::size_t k = 1; k < positions_.size(); ++k)
      if (positions_[k] <= positions_[k - 1])
        throw std::invalid_argument("ChainGeometry: positions must be strictly increasing");
    if (sender_pos_ == receiver_pos_)
      throw std::invalid_argument("ChainGeometry: sender and receiver must differ");
    sender_ = index_of(sender_pos_, "sender");
    receiver_ = index_of(receiver_pos_, "receiver");
  }

  const std::vector<int>& positions() const noexcept { return positions_; }
  std::size_t size() const noexcept { return positions_.size(); }
  int sender_pos() const noexcept { return sender_pos_; }
  int receiver_pos() const noexcept { return receiver_pos_; }
  /// Site index of the sender within positions().
  std::size_t sender() const noexcept { return sender_; }
  /// Site index of the receiver within positions().
  std::size_t receiver() const noexcept { return receiver_; }

  friend bool operator==(const ChainGeometry&, const ChainGeometry&) = default;

private:
  std::size_t index_of(int pos, const char* role) const {
    for (std::size_t k = 0; k < positions_.size(); ++k)
      if (positions_[k] == pos) return k;
    throw std::invalid_argument(std::string("ChainGeometry: ") + role +
                                " position is not an occupied site");
  }

  std::vector<int> positions_;
  int sender_pos_;
  int receiver_pos_;
  std::size_t sender_ = 0;
  std::size_t receiver_ = 0;
};

/// Uniformly filled lattice {1..total_positions}, optionally with the
/// double-hole vacancies at sender+1 and receiver-1. When the two vacancies
/// coincide only one site is removed.
inline ChainGeometry build_chain_geometry(int total_positions, int sender, int receiver,
                                          bool double_hole) {
  if (total_positions < 2)
    throw std::invalid_argument("build_chain_geometry: total_positions must be >= 2");
  if (sender == receiver)
    throw std::invalid_argument("build_chain_geometry: sender and receiver must differ");
  if (sender < 1 || receiver > total_positions || sender > receiver)
    throw std::invalid_argument(
        "build_chain_geometry: need 1 <= sender < receiver <= total_positions");
  if (double_hole && receiver - sender < 2)
    throw std::invalid_argument(
        "build_chain_geometry: double hole needs receiver - sender >= 2");

  std::vector<int> positions;
  positions.reserve(static_cast<std::size_t>(total_positions));
  for (int p = 1; p <= total_positions; ++p) {
    if (double_hole && (p == sender + 1 || p == receiver - 1)) continue;
    positions.push_back(p);
  }
  return ChainGeometry(std::move(positions), sender, receiver);
}

/// Symmetric pairwise couplings J_ij with zero diagonal.
class CouplingMatrix {
public:
  explicit CouplingMatrix(Matrix entries) : entries_(std::move(entries)) {
    if (!entries_.square() || entries_.rows() < 1)
      throw std::invalid_argument("CouplingMatrix: matrix must be square and non-empty");
    if (!entries_.all_finite()) throw std::invalid_argument("CouplingMatrix: non-finite entry");
    if (!entries_.is_symmetric()) throw std::invalid_argument("CouplingMatrix: not symmetric");
    for (std::size_t i = 0; i < entries_.rows(); ++i)
      if (entries_(i, i) != 0.0)
        throw std::invalid_argument("CouplingMatrix: diagonal must be zero");
  }

  std::size_t size() const noexcept { return entries_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_(i, j); }
  const Matrix& matrix() const noexcept { return entries_; }

  /// Sum over unordered pairs i < j.
  double pair_sum() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j) s += entries_(i, j);
    return s;
  }

private:
  Matrix entries_;
};

/// Reads a coupling matrix: first token N, then N*N whitespace-separated
/// reals in row-major order. Entries must be symmetric within 1e-12 and are
/// then symmetrized; diagonal entries within 1e-12 of zero are zeroed.
inline CouplingMatrix read_coupling_matrix(std::istream& in) {
  long long n = 0;
  if (!(in >> n)) throw std::invalid_argument("coupling matrix: missing size on first line");
  if (n < 2) throw std::invalid_argument("coupling matrix: size must be >= 2");
  const auto dim = static_cast<std::size_t>(n);
  Matrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      std::string token;
      if (!(in >> token)) {
        std::ostringstream msg;
        msg << "coupling matrix: expected " << dim * dim << " entries, got " << i * dim + j;
        throw std::invalid_argument(msg.str());
      }
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || !std::isfinite(value))
        throw std::invalid_argument("coupling matrix: bad number '" + token + "'");
      m(i, j) = value;
    }
  std::string extra;
  if (in >> extra) throw std::invalid_argument("coupling matrix: trailing data '" + extra + "'");

  for (std::size_t i = 0; i < dim; ++i) {
    if (std::abs(m(i, i)) > 1e-12)
      throw std::invalid_argument("coupling matrix: non-zero diagonal entry");
    m(i, i) = 0.0;
    for (std::size_t j = i + 1; j < dim; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-12) {
        std::ostringstream msg;
        msg << "coupling matrix: asymmetric entries at (" << i + 1 << "," << j + 1 << ")";
        throw std::invalid_argument(msg.str());
      }
      const double avg = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = avg;
      m(j, i) = avg;
    }
  }
  return CouplingMatrix(std::move(m));
}

inline CouplingMatrix load_coupling_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("coupling matrix: cannot open '" + path + "'");
  return read_coupling_matrix(in);
}

enum class CouplingKind { power_law, mirror_periodic, custom };

/// Coupling recipe. Only the fields relevant to `kind` are consulted.
struct CouplingModel {
  CouplingKind kind = CouplingKind::power_law;
  double nu = 3.0;          // power-law exponent
  double strength = 1.0;    // C
  double spacing = 1.0;     // a
  double lambda = 2.0;      // mirror-periodic scale
  std::optional<CouplingMatrix> custom;
};

/// J_ij = C / (a |p_i - p_j|)^nu over the occupied lattice positions.
inline CouplingMatrix power_law_couplings(const ChainGeometry& geometry,
                                          const CouplingModel& model) {
  if (model.kind != CouplingKind::power_law)
    throw std::invalid_argument("power_law_couplings: model kind must be power_law");
  if (!(model.nu > 0.0)) throw std::invalid_argument("power_law_couplings: need nu > 0");
  if (!(model.strength > 0.0)) throw std::invalid_argument("power_law_couplings: need C > 0");
  if (!(model.spacing > 0.0)) throw std::invalid_argument("power_law_couplings: need a > 0");

  const auto& p = geometry.positions();
  const std::size_t n = p.size();
  Matrix j(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const int dist = std::abs(p[a] - p[b]);
      if (dist == 0) throw std::invalid_argument("power_law_couplings: duplicate position");
      const double value = model.strength / std::pow(model.spacing * dist, model.nu);
      j(a, b) = value;
      j(b, a) = value;
    }
  return CouplingMatrix(std::move(j));
}

/// Engineered nearest-neighbour chain, J_{i,i+1} = (lambda/2) sqrt(i (n - i))
/// with 1-based i. Under pure hopping it transfers perfectly at t = pi/lambda.
inline CouplingMatrix mirror_periodic_couplings(std::size_t n_sites, double lambda) {
  if (n_sites < 2) throw std::invalid_argument("mirror_periodic_couplings: need n_sites >= 2");
  if (!(lambda > 0.0)) throw std::invalid_argument("mirror_periodic_couplings: need lambda > 0");
  Matrix j(n_sites, n_sites);
  for (std::size_t i = 1; i < n_sites; ++i) {
    const double value =
        0.5 * lambda * std::sqrt(static_cast<double>(i) * static_cast<double>(n_sites - i));
    j(i - 1, i) = value;
    j(i, i - 1) = value;
  }
  return CouplingMatrix(std::move(j));
}

/// Dispatches on model.kind. Mirror-periodic couplings are laid along the
/// occupied sites in order; a custom matrix must match the site count.
inline CouplingMatrix build_couplings(const ChainGeometry& geometry, const CouplingModel& model) {
  switch (model.kind) {
    case CouplingKind::power_law:
      return power_law_couplings(geometry, model);
    case CouplingKind::mirror_periodic:
      return mirror_periodic_couplings(geometry.size(), model.lambda);
    case CouplingKind::custom:
      if (!model.custom) throw std::invalid_argument("build_couplings: custom matrix missing");
      if (model.custom->size() != geometry.size())
        throw std::invalid_argument("build_couplings: custom matrix size does not match chain");
      return *model.custom;
  }
  throw std::invalid_argument("build_couplings: unknown coupling kind");
}

/// H = sum_{i != j} J_ij (S_i.S_j - 3 S^z_i S^z_j) restricted to one up-spin.
/// Row k is the state with the up-spin on site k.
struct SectorHamiltonian {
  Matrix matrix;
  bool include_zz_diagonal = true;

  std::size_t size() const noexcept { return matrix.rows(); }
};

/// Off-diagonal H_nm = J_nm. With the ZZ diagonal,
/// H_nn = 2 sum_{j != n} J_nj - sum_{i<j} J_ij (the constant is kept so the
/// block matches the full-space Hamiltonian exactly); otherwise H_nn = 0.
inline SectorHamiltonian sector_hamiltonian(const CouplingMatrix& couplings,
                                            bool include_zz_diagonal = true) {
  const std::size_t n = couplings.size();
  SectorHamiltonian h{Matrix(n, n), include_zz_diagonal};
  const double background = couplings.pair_sum();
  for (std::size_t a = 0; a < n; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      h.matrix(a, b) = couplings(a, b);
      row += couplings(a, b);
    }
    h.matrix(a, a) = include_zz_diagonal ? 2.0 * row - background : 0.0;
  }
  return h;
}

inline constexpr std::size_t kMaxFullSpaceSpins = 14;

/// Hamiltonian on the full 2^N product space. Basis index b has site k up
/// iff bit k of b is set (site 0 is the least significant bit).
struct FullHamiltonian {
  std::size_t spins = 0;
  Matrix matrix;
  bool include_zz = true;

  static std::size_t single_excitation_index(std::size_t site) { return std::size_t{1} << site; }
};

/// Assembles sum over ordered pairs i != j of J_ij (S_i.S_j - 3 S^z_i S^z_j)
/// from spin-1/2 operator actions. With include_zz false the Ising part is
/// dropped entirely, leaving J_ij (S^x_i S^x_j + S^y_i S^y_j).
inline FullHamiltonian full_hamiltonian(const CouplingMatrix& couplings, bool include_zz = true) {
  const std::size_t n = couplings.size();
  if (n > kMaxFullSpaceSpins) {
    std::ostringstream msg;
    msg << "full_hamiltonian: " << n << " spins exceeds the limit of " << kMaxFullSpaceSpins
        << " (matrix would be " << (std::size_t{1} << std::min<std::size_t>(n, 63)) << "^2)";
    throw std::length_error(msg.str());
  }
  const std::size_t dim = std::size_t{1} << n;
  FullHamiltonian h{n, Matrix(dim, dim), include_zz};

  auto sz = [](std::size_t state, std::size_t site) {
    return ((state >> site) & 1U) ? 0.5 : -0.5;
  };

  for (std::size_t state = 0; state < dim; ++state) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double jij = couplings(i, j);
        if (jij == 0.0) continue;
        const double zz = sz(state, i) * sz(state, j);
        // S_i.S_j = S^z S^z + (S^+_i S^-_j + S^-_i S^+_j) / 2
        const double ising = include_zz ? zz - 3.0 * zz : 0.0;
        h.matrix(state, state) += jij * ising;
        const bool up_i = (state >> i) & 1U;
        const bool up_j = (state >> j) & 1U;
        // S^+_i S^-_j acts when i is down and j is up; the mirror term when
        // i is up and j is down. Each has unit matrix element for spin 1/2.
        if (up_i != up_j) {
          const std::size_t flipped = state ^ (std::size_t{1} << i) ^ (std::size_t{1} << j);
          h.matrix(flipped, state) += jij * 0.5;
        }
      }
    }
  }
  return h;
}

/// Number of up-spins in a full-space basis state.
inline int excitation_count(std::size_t state) noexcept {
  return static_cast<int>(__builtin_popcountll(static_cast<unsigned long long>(state)));
}

}  // namespace spinchain

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "spinchain/model.hpp"
#include "test_support.hpp"

using namespace spinchain;

TEST(Geometry, CompleteChain) {
  const auto g = build_chain_geometry(4, 1, 4, false);
  EXPECT_EQ(g.positions(), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(g.sender(), 0u);
  EXPECT_EQ(g.receiver(), 3u);
}

TEST(Geometry, DoubleHoleRemovesNeighbours) {
  const auto g = build_chain_geometry(6, 1, 6, true);
  EXPECT_EQ(g.positions(), (std::vector<int>{1, 3, 4, 6}));
  EXPECT_EQ(g.sender_pos(), 1);
  EXPECT_EQ(g.receiver_pos(), 6);
  EXPECT_EQ(g.receiver(), 3u);
}

TEST(Geometry, CoincidentHolesRemoveOneSite) {
  EXPECT_EQ(build_chain_geometry(3, 1, 3, true).positions(), (std::vector<int>{1, 3}));
  EXPECT_EQ(build_chain_geometry(4, 1, 4, true).positions(), (std::vector<int>{1, 4}));
}

TEST(Geometry, InnerSenderReceiver) {
  const auto g = build_chain_geometry(8, 2, 7, true);
  EXPECT_EQ(g.positions(), (std::vector<int>{1, 2, 4, 5, 7, 8}));
  EXPECT_EQ(g.sender(), 1u);
  EXPECT_EQ(g.receiver(), 4u);
}

TEST(Geometry, Errors) {
  EXPECT_THROW(build_chain_geometry(1, 1, 1, false), std::invalid_argument);
  EXPECT_THROW(build_chain_geometry(4, 2, 2, false), std::invalid_argument);
  EXPECT_THROW(build_chain_geometry(4, 0, 3, false), std::invalid_argument);
  EXPECT_THROW(build_chain_geometry(4, 1, 5, false), std::invalid_argument);
  EXPECT_THROW(build_chain_geometry(4, 3, 1, false), std::invalid_argument);
  EXPECT_THROW(build_chain_geometry(4, 1, 2, true), std::invalid_argument);
  EXPECT_THROW(ChainGeometry({1, 1, 2}, 1, 2), std::invalid_argument);
  EXPECT_THROW(ChainGeometry({1, 2, 3}, 1, 5), std::invalid_argument);
}

TEST(PowerLaw, DipolarValues) {
  CouplingModel m;
  const auto j = power_law_couplings(build_chain_geometry(3, 1, 3, false), m);
  EXPECT_DOUBLE_EQ(j(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(j(1, 2), 1.0);
  EXPECT_DOUBLE_EQ(j(0, 2), 0.125);
  EXPECT_EQ(j(0, 0), 0.0);

  const auto across = power_law_couplings(build_chain_geometry(3, 1, 3, true), m);
  ASSERT_EQ(across.size(), 2u);
  EXPECT_DOUBLE_EQ(across(0, 1), 0.125);

  m.spacing = 2.0;
  EXPECT_DOUBLE_EQ(power_law_couplings(build_chain_geometry(2, 1, 2, false), m)(0, 1), 0.125);
}

TEST(PowerLaw, RejectsBadParameters) {
  const auto g = build_chain_geometry(3, 1, 3, false);
  CouplingModel m;
  m.nu = 0.0;
  EXPECT_THROW(power_law_couplings(g, m), std::invalid_argument);
  m.nu = -1.0;
  EXPECT_THROW(power_law_couplings(g, m), std::invalid_argument);
  m = {};
  m.kind = CouplingKind::mirror_periodic;
  EXPECT_THROW(power_law_couplings(g, m), std::invalid_argument);
}

TEST(PowerLaw, SymmetricAndMonotoneInDistance) {
  CouplingModel m;
  m.nu = 1.7;
  const auto g = build_chain_geometry(12, 1, 12, true);
  const auto j = power_law_couplings(g, m);
  EXPECT_TRUE(j.matrix().is_symmetric());
  const auto& p = g.positions();
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = a + 1; b < p.size(); ++b)
      for (std::size_t c = 0; c < p.size(); ++c)
        for (std::size_t d = c + 1; d < p.size(); ++d)
          if (std::abs(p[a] - p[b]) < std::abs(p[c] - p[d])) {
            EXPECT_GT(j(a, b), j(c, d));
          }
}

TEST(MirrorPeriodic, Values) {
  EXPECT_DOUBLE_EQ(mirror_periodic_couplings(2, 2.0)(0, 1), 1.0);
  const auto j3 = mirror_periodic_couplings(3, 2.0);
  EXPECT_DOUBLE_EQ(j3(0, 1), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(j3(1, 2), std::sqrt(2.0));
  EXPECT_EQ(j3(0, 2), 0.0);
  EXPECT_THROW(mirror_periodic_couplings(1, 2.0), std::invalid_argument);
  EXPECT_THROW(mirror_periodic_couplings(4, 0.0), std::invalid_argument);
}

TEST(MirrorPeriodic, Palindromic) {
  for (std::size_t n : {2u, 5u, 10u, 17u}) {
    const auto j = mirror_periodic_couplings(n, 1.3);
    for (std::size_t i = 0; i + 1 < n; ++i) EXPECT_EQ(j(i, i + 1), j(n - 2 - i, n - 1 - i));
    EXPECT_TRUE(j.matrix().is_symmetric());
  }
}

TEST(CouplingFile, ReadsAndSymmetrizes) {
  std::istringstream in("3\n0 0.5 0.25\n0.5000000000001 0 1\n0.25 1 0\n");
  const auto j = read_coupling_matrix(in);
  EXPECT_EQ(j.size(), 3u);
  EXPECT_TRUE(j.matrix().is_symmetric());
  EXPECT_NEAR(j(0, 1), 0.5, 1e-13);
  EXPECT_EQ(j(1, 2), 1.0);
}

TEST(CouplingFile, RejectsMalformed) {
  auto parse = [](const char* text) {
    std::istringstream in(text);
    return read_coupling_matrix(in);
  };
  EXPECT_THROW(parse("2\n0 1\n2 0\n"), std::invalid_argument);      // asymmetric
  EXPECT_THROW(parse("2\n0.1 1\n1 0\n"), std::invalid_argument);    // diagonal
  EXPECT_THROW(parse("2\n0 1\n1\n"), std::invalid_argument);        // short
  EXPECT_THROW(parse("2\n0 1\n1 0 7\n"), std::invalid_argument);    // trailing
  EXPECT_THROW(parse("2\n0 x\n1 0\n"), std::invalid_argument);      // bad number
  EXPECT_THROW(parse(""), std::invalid_argument);
}

TEST(CouplingMatrix, Validation) {
  Matrix m(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(CouplingMatrix{m}, std::invalid_argument);
  m(1, 0) = 1.0;
  m(0, 0) = 0.5;
  EXPECT_THROW(CouplingMatrix{m}, std::invalid_argument);
}

TEST(SectorHamiltonian, TwoSpins) {
  Matrix m(2, 2);
  m(0, 1) = m(1, 0) = 0.7;
  const CouplingMatrix j(m);
  const auto zz = sector_hamiltonian(j, true);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) EXPECT_DOUBLE_EQ(zz.matrix(a, b), 0.7);
  const auto xy = sector_hamiltonian(j, false);
  EXPECT_EQ(xy.matrix(0, 0), 0.0);
  EXPECT_EQ(xy.matrix(0, 1), 0.7);
  EXPECT_FALSE(xy.include_zz_diagonal);
}

TEST(SectorHamiltonian, OffDiagonalIsCouplingExactly) {
  const auto g = build_chain_geometry(9, 1, 9, true);
  const auto j = power_law_couplings(g, CouplingModel{});
  const auto h = sector_hamiltonian(j, true);
  for (std::size_t a = 0; a < j.size(); ++a)
    for (std::size_t b = 0; b < j.size(); ++b)
      if (a != b) {
        EXPECT_EQ(h.matrix(a, b), j(a, b));
      }
  EXPECT_TRUE(h.matrix.is_symmetric());
}

TEST(FullHamiltonian, VacuumEnergy) {
  Matrix m(2, 2);
  m(0, 1) = m(1, 0) = 0.9;
  const auto h = full_hamiltonian(CouplingMatrix(m));
  EXPECT_DOUBLE_EQ(h.matrix(0, 0), -0.9);
  EXPECT_DOUBLE_EQ(h.matrix(3, 3), -0.9);
  EXPECT_EQ(h.matrix.rows(), 4u);

  // General vacuum: -sum_{i<j} J_ij.
  const auto j = power_law_couplings(build_chain_geometry(6, 1, 6, false), CouplingModel{});
  EXPECT_NEAR(full_hamiltonian(j).matrix(0, 0), -j.pair_sum(), 1e-14);
}

TEST(FullHamiltonian, SizeGuard) {
  EXPECT_THROW(full_hamiltonian(mirror_periodic_couplings(15, 1.0)), std::length_error);
}

TEST(FullHamiltonian, ConservesMagnetization) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {2u, 4u, 6u}) {
    Matrix m(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) m(a, b) = m(b, a) = u(rng);
    for (bool zz : {true, false}) {
      const auto h = full_hamiltonian(CouplingMatrix(m), zz);
      EXPECT_TRUE(h.matrix.is_symmetric());
      for (std::size_t x = 0; x < h.matrix.rows(); ++x)
        for (std::size_t y = 0; y < h.matrix.cols(); ++y)
          if (excitation_count(x) != excitation_count(y)) {
            EXPECT_EQ(h.matrix(x, y), 0.0);
          }
    }
  }
}

// The sector builder uses the closed-form diagonal; the full builder applies
// spin operators pair by pair. Their single-excitation blocks must agree.
TEST(FullHamiltonian, SingleExcitationBlockMatchesSector) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  std::vector<CouplingMatrix> instances;
  for (int n = 2; n <= 8; ++n) {
    instances.push_back(
        power_law_couplings(build_chain_geometry(n, 1, n, false), CouplingModel{}));
    if (n >= 2)
      instances.push_back(power_law_couplings(build_chain_geometry(n + 2, 1, n + 2, true),
                                              CouplingModel{}));
    instances.push_back(mirror_periodic_couplings(static_cast<std::size_t>(n), u(rng)));
    CouplingModel random_nu;
    random_nu.nu = u(rng) * 2.0;
    random_nu.strength = u(rng);
    instances.push_back(power_law_couplings(build_chain_geometry(n, 1, n, false), random_nu));
  }
  for (const auto& j : instances) {
    for (bool zz : {true, false}) {
      const auto sector = sector_hamiltonian(j, zz);
      const auto full = full_hamiltonian(j, zz);
      for (std::size_t a = 0; a < j.size(); ++a)
        for (std::size_t b = 0; b < j.size(); ++b)
          EXPECT_NEAR(sector.matrix(a, b),
                      full.matrix(FullHamiltonian::single_excitation_index(a),
                                  FullHamiltonian::single_excitation_index(b)),
                      1e-12)
              << "n=" << j.size() << " zz=" << zz;
    }
  }
}

TEST(BuildCouplings, Dispatch) {
  const auto g = build_chain_geometry(4, 1, 4, false);
  CouplingModel m;
  EXPECT_EQ(build_couplings(g, m).matrix(), power_law_couplings(g, m).matrix());
  m.kind = CouplingKind::mirror_periodic;
  m.lambda = 3.0;
  EXPECT_EQ(build_couplings(g, m).matrix(), mirror_periodic_couplings(4, 3.0).matrix());
  m.kind = CouplingKind::custom;
  EXPECT_THROW(build_couplings(g, m), std::invalid_argument);
  m.custom = mirror_periodic_couplings(3, 1.0);
  EXPECT_THROW(build_couplings(g, m), std::invalid_argument);
  m.custom = mirror_periodic_couplings(4, 1.0);
  EXPECT_EQ(build_couplings(g, m).matrix(), m.custom->matrix());
}

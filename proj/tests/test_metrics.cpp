#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "spinchain/metrics.hpp"
#include "test_support.hpp"

using namespace spinchain;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralDecomposition decompose(const fixtures::Case& c) {
  return eigendecompose(sector_hamiltonian(build_couplings(c.geometry, c.coupling), c.include_zz));
}

std::vector<Complex> random_state(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Complex> v(n);
  double norm = 0.0;
  for (auto& z : v) {
    z = {g(rng), g(rng)};
    norm += std::norm(z);
  }
  for (auto& z : v) z /= std::sqrt(norm);
  return v;
}

}  // namespace

TEST(Fidelity, Values) {
  EXPECT_DOUBLE_EQ(transfer_fidelity(1.0), 1.0);
  EXPECT_NEAR(transfer_fidelity({0.5, 0.5}), 0.5, 1e-15);
  EXPECT_EQ(transfer_fidelity(0.0), 0.0);
}

TEST(AveragedFidelity, Values) {
  EXPECT_DOUBLE_EQ(averaged_fidelity(1.0), 1.0);
  EXPECT_DOUBLE_EQ(averaged_fidelity(0.0), 0.5);
  // |f| = 1/sqrt(2): 1/12 + sqrt(2)/6 + 1/2, evaluated term by term.
  const double m = 1.0 / std::sqrt(2.0);
  const double expected = 1.0 / 12.0 + std::sqrt(2.0) / 6.0 + 0.5;
  EXPECT_NEAR(averaged_fidelity(std::polar(m, 0.3)), expected, 1e-15);
  EXPECT_NEAR(expected, 0.8190356, 1e-7);
  EXPECT_THROW(averaged_fidelity(1.001), std::invalid_argument);
}

TEST(ConcurrenceClosedForm, Values) {
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(concurrence_closed_form({kPi, 0.0}, h, Complex(0.0, h)), 1.0, 1e-15);
  EXPECT_EQ(concurrence_closed_form({0.0, 0.0}, h, h), 0.0);
  EXPECT_EQ(concurrence_closed_form({kPi, 0.0}, 1.0, 0.0), 0.0);
  EXPECT_NEAR(concurrence_closed_form({kPi / 2, 1.0}, 0.6, 0.8), 2 * 0.5 * 0.48, 1e-15);
  EXPECT_THROW(concurrence_closed_form({kPi, 0.0}, 1.1, 0.0), std::invalid_argument);
}

TEST(ConcurrenceClosedForm, NondecreasingInTheta) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = random_state(4, rng);
    double prev = -1.0;
    for (int k = 0; k <= 200; ++k) {
      const double c = concurrence_closed_form({kPi * k / 200.0, 0.0}, v[0], v[1]);
      EXPECT_GE(c, prev);
      prev = c;
    }
  }
}

TEST(Wootters, BellStateIsMaximallyEntangled) {
  const double h = 1.0 / std::sqrt(2.0);
  const std::vector<Complex> bell{h, 0.0, h};
  EXPECT_NEAR(wootters_concurrence_oracle({kPi, 0.0}, bell, 0, 2), 1.0, 1e-12);
  const std::vector<Complex> minus{h, -h};
  EXPECT_NEAR(wootters_concurrence_oracle({kPi, 0.0}, minus, 0, 1), 1.0, 1e-12);
}

TEST(Wootters, SeparableStates) {
  const std::vector<Complex> local{1.0, 0.0, 0.0, 0.0};
  EXPECT_NEAR(wootters_concurrence_oracle({kPi, 0.0}, local, 0, 3), 0.0, 1e-12);
  const std::vector<Complex> spread{0.0, 0.0, 1.0, 0.0};
  EXPECT_NEAR(wootters_concurrence_oracle({kPi, 0.0}, spread, 0, 3), 0.0, 1e-12);
  EXPECT_NEAR(wootters_concurrence_oracle({0.0, 0.0}, local, 0, 3), 0.0, 1e-12);
}

TEST(Wootters, RejectsUnnormalizedInput) {
  const std::vector<Complex> bad{0.9, 0.0};
  EXPECT_THROW(wootters_concurrence_oracle({kPi, 0.0}, bad, 0, 1), std::invalid_argument);
  const std::vector<Complex> ok{1.0, 0.0};
  EXPECT_THROW(wootters_concurrence_oracle({kPi, 0.0}, ok, 0, 0), std::invalid_argument);
}

TEST(Wootters, AgreesWithClosedFormOnRandomStates) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> theta(0.0, kPi), phi(0.0, 2 * kPi);
  std::uniform_int_distribution<std::size_t> size(2, 9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = size(rng);
    const auto v = random_state(n, rng);
    const std::size_t s = trial % n;
    const std::size_t r = (s + 1 + trial % (n - 1)) % n;
    const InitialStateParams p{theta(rng), phi(rng)};
    EXPECT_NEAR(wootters_concurrence_oracle(p, v, s, r), concurrence_closed_form(p, v[s], v[r]),
                1e-10)
        << "trial " << trial;
  }
}

TEST(Dispersion, Values) {
  const std::vector<Complex> start{1.0, 0.0, 0.0};
  EXPECT_EQ(dispersion(start, 0, 2), 0.0);
  const double q = 0.5;
  const std::vector<Complex> spread{q, Complex(0, q), q, -q};
  EXPECT_NEAR(dispersion(spread, 0, 3), 0.5, 1e-15);
  EXPECT_THROW(dispersion(spread, 0, 4), std::out_of_range);
}

TEST(SpectralOverlaps, TwoSpin) {
  Matrix m(2, 2);
  m(0, 1) = m(1, 0) = 0.4;
  const auto d = eigendecompose(sector_hamiltonian(CouplingMatrix(m)));
  const auto o = spectral_overlaps(d, 0, 1);
  const double h = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(std::abs(o.sigma[j]), h, 1e-15);
    EXPECT_NEAR(std::abs(o.rho[j]), h, 1e-15);
    EXPECT_EQ(o.gamma_sq[j], 0.0);
  }
  EXPECT_EQ(leakage_bound(o).gamma_m, 0.0);
}

TEST(SpectralOverlaps, NormalizationAcrossGeometries) {
  for (const auto& c : fixtures::geometry_matrix(2, 12)) {
    const auto d = decompose(c);
    const auto o = spectral_overlaps(d, c.geometry.sender(), c.geometry.receiver());
    double ss = 0, rr = 0, gg = 0;
    for (std::size_t j = 0; j < o.size(); ++j) {
      EXPECT_NEAR(o.sigma[j] * o.sigma[j] + o.rho[j] * o.rho[j] + o.gamma_sq[j], 1.0, 1e-10);
      ss += o.sigma[j] * o.sigma[j];
      rr += o.rho[j] * o.rho[j];
      gg += o.gamma_sq[j];
    }
    EXPECT_NEAR(ss, 1.0, 1e-10) << c.name;
    EXPECT_NEAR(rr, 1.0, 1e-10) << c.name;
    EXPECT_NEAR(gg, static_cast<double>(o.size()) - 2.0, 1e-10) << c.name;
  }
}

TEST(LeakageBound, ExtremalSymmetricOverlaps) {
  // Every eigenvector with gamma^2 = (N-2)/N and sigma^2 = rho^2 = (1 - gamma^2)/2.
  for (std::size_t n : {3u, 6u, 10u}) {
    const double g = (n - 2.0) / n;
    SpectralOverlaps o;
    o.sigma.assign(n, std::sqrt((1 - g) / 2));
    o.rho.assign(n, std::sqrt((1 - g) / 2));
    o.gamma_sq.assign(n, g);
    EXPECT_NEAR(leakage_bound(o).gamma_m, g, 1e-14);
    EXPECT_NEAR(leakage_bound(o).bound, n * g, 1e-13);
    EXPECT_NEAR(leakage_under_symmetry(o), g, 1e-14);
  }
}

TEST(LeakageBound, DispersionNeverExceedsBound) {
  for (const auto& c : fixtures::geometry_matrix(2, 10)) {
    const auto d = decompose(c);
    const auto o = spectral_overlaps(d, c.geometry.sender(), c.geometry.receiver());
    const double bound = leakage_bound(o).bound;
    for (const auto& s : amplitude_series(d, c.geometry.sender(), c.geometry.receiver(),
                                          uniform_grid(60.0, 600)))
      EXPECT_LE(s.channel_norm_sq, bound + 1e-10) << c.name << " t=" << s.t;
  }
}

TEST(LeakageBound, DoubleHoleLeaksLessThanCompleteChain) {
  const auto dh = end_to_end_geometry(10, ChainConfiguration::double_hole);
  const auto full = end_to_end_geometry(10, ChainConfiguration::complete);
  auto gamma_m = [](const ChainGeometry& g) {
    const auto d = eigendecompose(sector_hamiltonian(power_law_couplings(g, CouplingModel{})));
    return leakage_bound(spectral_overlaps(d, g.sender(), g.receiver())).gamma_m;
  };
  EXPECT_LT(gamma_m(dh), gamma_m(full));
}

// Mirror-symmetric chains satisfy sigma_j^2 = rho_j^2 exactly, so the
// symmetric-overlap form of Gamma_M must reproduce the direct one.
TEST(LeakageBound, SymmetricFormAgreesWhenResidualsVanish) {
  for (const auto& c : fixtures::geometry_matrix(2, 12)) {
    if (c.name == "inner_pair") continue;
    const auto d = decompose(c);
    const auto o = spectral_overlaps(d, c.geometry.sender(), c.geometry.receiver());
    const auto eff = two_qubit_effective(d, o);
    const double worst = *std::max_element(eff.residuals.begin(), eff.residuals.end());
    ASSERT_LE(worst, 1e-8) << c.name;
    EXPECT_NEAR(leakage_under_symmetry(o), leakage_bound(o).gamma_m, 1e-8) << c.name;
  }
}

TEST(LocalMaximumCurve, ConcurrenceEqualsOneMinusDispersion) {
  int hits = 0;
  for (const auto& c : fixtures::geometry_matrix(3, 10)) {
    const auto d = decompose(c);
    for (const auto& s : amplitude_series(d, c.geometry.sender(), c.geometry.receiver(),
                                          uniform_grid(80.0, 4000))) {
      if (std::abs(std::abs(s.f_ss) - std::abs(s.f_sr)) > 1e-6) continue;
      ++hits;
      EXPECT_NEAR(concurrence_closed_form({kPi, 0.0}, s.f_ss, s.f_sr), 1.0 - s.channel_norm_sq,
                  2e-6);
    }
  }
  // Also construct exact points on the curve.
  for (double g : {0.0, 0.1, 0.5, 0.9}) {
    const double a = std::sqrt((1 - g) / 2);
    EXPECT_NEAR(concurrence_closed_form({kPi, 0.0}, a, Complex(0, a)), 1.0 - g, 1e-15);
    ++hits;
  }
  EXPECT_GT(hits, 4);
}

TEST(TwoQubitEffective, TrueTwoQubit) {
  for (double j : {0.1, 0.5, 2.0}) {
    Matrix m(2, 2);
    m(0, 1) = m(1, 0) = j;
    const auto d = eigendecompose(sector_hamiltonian(CouplingMatrix(m)));
    const auto eff = two_qubit_effective(d, spectral_overlaps(d, 0, 1));
    EXPECT_NEAR(eff.prediction.delta, 2 * j, 1e-14);
    EXPECT_NEAR(eff.prediction.transfer_time, kPi / (2 * j), 1e-12);
    EXPECT_NEAR(eff.prediction.entangling_time, kPi / (4 * j), 1e-12);
    EXPECT_NEAR(eff.dominant_mass, 1.0, 1e-14);
    for (double r : eff.residuals) EXPECT_NEAR(r, 0.0, 1e-15);
  }
}

TEST(TwoQubitEffective, DoubleHoleVersusMirrorPeriodic) {
  const auto dh = end_to_end_geometry(10, ChainConfiguration::double_hole);
  const auto d = eigendecompose(sector_hamiltonian(power_law_couplings(dh, CouplingModel{})));
  const auto eff = two_qubit_effective(d, spectral_overlaps(d, dh.sender(), dh.receiver()));
  EXPECT_GE(eff.dominant_mass, 0.99);

  const auto mp = eigendecompose(sector_hamiltonian(mirror_periodic_couplings(10, 2.0), false));
  const auto eff_mp = two_qubit_effective(mp, spectral_overlaps(mp, 0, 9));
  // Binomial weights C(9, k) / 2^9: the two central ones sum to 252/512.
  EXPECT_NEAR(eff_mp.dominant_mass, 252.0 / 512.0, 1e-10);
}

TEST(TwoQubitEffective, DegenerateDominantPairIsAnError) {
  // Sender and receiver decoupled from each other and from the rest.
  Matrix m(3, 3);
  const auto d = eigendecompose(sector_hamiltonian(CouplingMatrix(m), false));
  EXPECT_THROW(two_qubit_effective(d, spectral_overlaps(d, 0, 2)), NumericalError);
}

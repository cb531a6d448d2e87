#pragma once

// Transfer and entanglement figures of merit for a sender/receiver pair, plus
// spectral diagnostics of how close a chain is to an effective two-qubit
// system.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "spinchain/dynamics.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/linalg.hpp"

namespace spinchain {

/// Bloch angles of the sender's initial qubit. theta = pi puts the excitation
/// on the sender with certainty.
struct InitialStateParams {
  double theta = std::numbers::pi;
  double phi = 0.0;

  void validate() const {
    if (!(theta >= 0.0 && theta <= std::numbers::pi))
      throw std::invalid_argument("InitialStateParams: theta must lie in [0, pi]");
    if (!(phi >= 0.0 && phi < 2.0 * std::numbers::pi))
      throw std::invalid_argument("InitialStateParams: phi must lie in [0, 2pi)");
  }
};

namespace detail {

inline constexpr double kModulusSlack = 1e-10;
inline constexpr double kConcurrenceSlack = 1e-9;

inline double checked_modulus(Complex f, const char* what) {
  const double m = std::abs(f);
  if (!(m <= 1.0 + kModulusSlack)) {
    std::ostringstream msg;
    msg << what << ": amplitude modulus " << m << " exceeds 1";
    throw std::invalid_argument(msg.str());
  }
  return std::min(m, 1.0);
}

inline double clamp_concurrence(double raw, const char* what) {
  if (!(raw >= -kConcurrenceSlack && raw <= 1.0 + kConcurrenceSlack)) {
    std::ostringstream msg;
    msg << what << ": concurrence " << raw << " outside [0, 1]";
    throw NumericalError(msg.str());
  }
  return std::clamp(raw, 0.0, 1.0);
}

}  // namespace detail

/// F = |f_sr|^2.
inline double transfer_fidelity(Complex f_sr) {
  const double m = std::abs(f_sr);
  return std::clamp(m * m, 0.0, 1.0);
}

/// Transfer fidelity averaged over all input states on the Bloch sphere:
/// |f|^2/6 + |f|/3 + 1/2.
inline double averaged_fidelity(Complex f_sr) {
  const double m = detail::checked_modulus(f_sr, "averaged_fidelity");
  return m * m / 6.0 + m / 3.0 + 0.5;
}

/// C = 2 sin^2(theta/2) |f_ss| |f_sr|.
inline double concurrence_closed_form(const InitialStateParams& params, Complex f_ss,
                                      Complex f_sr) {
  const double a = detail::checked_modulus(f_ss, "concurrence_closed_form");
  const double b = detail::checked_modulus(f_sr, "concurrence_closed_form");
  const double half = std::sin(0.5 * params.theta);
  return detail::clamp_concurrence(2.0 * half * half * a * b, "concurrence_closed_form");
}

namespace detail {

// Singular values, largest first, of a complex matrix given row-major. Read
// off the symmetric embedding [[0, B], [B^T, 0]] of the real form
// B = [[Re, -Im], [Im, Re]]: its positive eigenvalues are the singular values,
// each repeated twice. Small singular values keep absolute accuracy, unlike a
// square root of an eigenvalue of the Gram matrix.
inline std::vector<double> singular_values_desc(const std::vector<Complex>& a, std::size_t m) {
  const std::size_t n = 2 * m;
  Matrix big(2 * n, 2 * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const Complex z = a[i * m + j];
      const double block[2][2] = {{z.real(), -z.imag()}, {z.imag(), z.real()}};
      for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t v = 0; v < 2; ++v) {
          const std::size_t row = i + u * m;
          const std::size_t col = n + j + v * m;
          big(row, col) = block[u][v];
          big(col, row) = block[u][v];
        }
    }
  std::vector<double> ev = jacobi_eigen(big).values;
  std::sort(ev.begin(), ev.end(), std::greater<>());
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = std::max(ev[2 * k], 0.0);
  return out;
}

}  // namespace detail

/// Wootters concurrence of the sender/receiver reduced state, computed from
/// scratch: build the evolved global pure state
///   cos(theta/2)|vac> + e^{-i phi} sin(theta/2) sum_n f_{s,n} |n>,
/// trace out every site except s and r, and return
/// max(0, l1 - l2 - l3 - l4) where l_k are the decreasing square roots of
/// the eigenvalues of rho (sy x sy) rho* (sy x sy).
inline double wootters_concurrence_oracle(const InitialStateParams& params,
                                          std::span<const Complex> amplitudes, std::size_t s,
                                          std::size_t r) {
  const std::size_t n = amplitudes.size();
  if (s >= n || r >= n || s == r)
    throw std::invalid_argument("wootters_concurrence_oracle: invalid sender/receiver");
  double norm = 0.0;
  for (Complex a : amplitudes) norm += std::norm(a);
  if (std::abs(norm - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "wootters_concurrence_oracle: amplitude vector norm^2 " << norm << " is not 1";
    throw std::invalid_argument(msg.str());
  }

  // Global state as sparse (occupation bitstring -> amplitude) components.
  struct Component {
    std::vector<bool> bits;
    Complex amplitude;
  };
  std::vector<Component> state;
  state.push_back({std::vector<bool>(n, false), Complex{std::cos(0.5 * params.theta), 0.0}});
  const Complex lead = std::polar(std::sin(0.5 * params.theta), -params.phi);
  for (std::size_t site = 0; site < n; ++site) {
    std::vector<bool> bits(n, false);
    bits[site] = true;
    state.push_back({std::move(bits), lead * amplitudes[site]});
  }

  // Partial trace: group by the occupation of the traced-out sites.
  std::map<std::vector<bool>, std::array<Complex, 4>> by_environment;
  for (const auto& c : state) {
    std::vector<bool> env;
    env.reserve(n - 2);
    for (std::size_t k = 0; k < n; ++k)
      if (k != s && k != r) env.push_back(c.bits[k]);
    const int local = (c.bits[s] ? 2 : 0) + (c.bits[r] ? 1 : 0);
    by_environment[env][static_cast<std::size_t>(local)] += c.amplitude;
  }
  // rho = W W^dagger with one column of W per environment configuration.
  // The nonzero eigenvalues of rho (sy x sy) rho* (sy x sy) are the squared
  // singular values of tau = W^T (sy x sy) W.
  const double flip[4][4] = {{0, 0, 0, -1}, {0, 0, 1, 0}, {0, 1, 0, 0}, {-1, 0, 0, 0}};
  std::vector<std::array<Complex, 4>> w;
  for (const auto& entry : by_environment) w.push_back(entry.second);
  const std::size_t m = w.size();
  std::vector<Complex> tau(m * m);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t q = 0; q < m; ++q) {
      Complex acc{};
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          if (flip[i][j] != 0.0) acc += w[k][i] * flip[i][j] * w[q][j];
      tau[k * m + q] = acc;
    }
  std::vector<double> l = detail::singular_values_desc(tau, m);
  l.resize(std::max<std::size_t>(m, 4), 0.0);
  const double raw = l[0] - l[1] - l[2] - l[3];
  return detail::clamp_concurrence(std::max(0.0, raw), "wootters_concurrence_oracle");
}

/// Probability on every site other than s and r.
inline double dispersion(std::span<const Complex> amplitudes, std::size_t s, std::size_t r) {
  if (s >= amplitudes.size() || r >= amplitudes.size())
    throw std::out_of_range("dispersion: site index out of range");
  double total = 0.0;
  for (std::size_t k = 0; k < amplitudes.size(); ++k)
    if (k != s && k != r) total += std::norm(amplitudes[k]);
  return total;
}

/// Per-eigenvector projections onto sender, receiver and the channel.
struct SpectralOverlaps {
  std::vector<double> sigma;     // <l_j|s>
  std::vector<double> rho;       // <l_j|r>
  std::vector<double> gamma_sq;  // sum_{i != s,r} |<l_j|i>|^2

  std::size_t size() const noexcept { return sigma.size(); }
};

inline SpectralOverlaps spectral_overlaps(const SpectralDecomposition& d, std::size_t s,
                                          std::size_t r) {
  const std::size_t n = d.size();
  if (s >= n || r >= n || s == r)
    throw std::invalid_argument("spectral_overlaps: invalid sender/receiver");
  SpectralOverlaps o;
  o.sigma.resize(n);
  o.rho.resize(n);
  o.gamma_sq.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    o.sigma[j] = d.eigenvectors(s, j);
    o.rho[j] = d.eigenvectors(r, j);
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != s && i != r) g += d.eigenvectors(i, j) * d.eigenvectors(i, j);
    o.gamma_sq[j] = g;
  }
  return o;
}

struct LeakageBound {
  double gamma_m = 0.0;  // sum_j sigma_j^2 gamma_j^2
  double bound = 0.0;    // N * gamma_m, an upper bound on the dispersion at any t
};

inline LeakageBound leakage_bound(const SpectralOverlaps& o) {
  LeakageBound out;
  for (std::size_t j = 0; j < o.size(); ++j) out.gamma_m += o.sigma[j] * o.sigma[j] * o.gamma_sq[j];
  out.bound = static_cast<double>(o.size()) * out.gamma_m;
  return out;
}

/// Gamma_M evaluated under the local-maximum conditions
/// sigma_j^2 = rho_j^2 = (1 - gamma_j^2)/2. Only meaningful when the
/// residuals reported by two_qubit_effective vanish.
inline double leakage_under_symmetry(const SpectralOverlaps& o) {
  double total = 0.0;
  for (double g : o.gamma_sq) total += 0.5 * (1.0 - g) * g;
  return total;
}

struct TwoQubitPrediction {
  double delta = 0.0;            // energy gap of the dominant pair
  double transfer_time = 0.0;    // pi / delta
  double entangling_time = 0.0;  // transfer_time / 2

  static TwoQubitPrediction from_gap(double delta) {
    const double t = std::numbers::pi / delta;
    return {delta, t, 0.5 * t};
  }
};

struct EffectiveTwoQubit {
  TwoQubitPrediction prediction;
  /// | sigma_j^2 - rho_j^2 | + | sigma_j^2 + rho_j^2 - (1 - gamma_j^2) | per j.
  std::vector<double> residuals;
  /// Eigenvector indices (ascending) carrying the largest sender weight.
  std::array<std::size_t, 2> dominant_pair{};
  /// sigma^2 summed over the dominant pair.
  double dominant_mass = 0.0;
};

/// Treats the two eigenvectors with the largest sender weight as the
/// effective sender/receiver pair. Equal weights go to the lower index.
inline EffectiveTwoQubit two_qubit_effective(const SpectralDecomposition& d,
                                             const SpectralOverlaps& o) {
  const std::size_t n = d.size();
  if (n < 2 || o.size() != n)
    throw std::invalid_argument("two_qubit_effective: need a matching decomposition with N >= 2");

  EffectiveTwoQubit out;
  out.residuals.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s2 = o.sigma[j] * o.sigma[j];
    const double r2 = o.rho[j] * o.rho[j];
    out.residuals[j] = std::abs(s2 - r2) + std::abs(s2 + r2 - (1.0 - o.gamma_sq[j]));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return o.sigma[a] * o.sigma[a] > o.sigma[b] * o.sigma[b];
  });
  out.dominant_pair = {std::min(order[0], order[1]), std::max(order[0], order[1])};
  out.dominant_mass = o.sigma[order[0]] * o.sigma[order[0]] + o.sigma[order[1]] * o.sigma[order[1]];

  const double delta =
      std::abs(d.eigenvalues[out.dominant_pair[1]] - d.eigenvalues[out.dominant_pair[0]]);
  if (delta < 1e-14) {
    std::ostringstream msg;
    msg << "two_qubit_effective: dominant pair (" << out.dominant_pair[0] << ", "
        << out.dominant_pair[1] << ") is degenerate (gap " << delta
        << "); no finite transfer time";
    throw NumericalError(msg.str());
  }
  out.prediction = TwoQubitPrediction::from_gap(delta);
  return out;
}

}  // namespace spinchain

#pragma once

// Exact single-excitation dynamics through the spectral form of the propagator:
//   f_{from,to}(t) = sum_j <to|l_j><l_j|from> exp(-i E_j t),  hbar = 1.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "spinchain/errors.hpp"
#include "spinchain/linalg.hpp"
#include "spinchain/model.hpp"

namespace spinchain {

using Complex = std::complex<double>;

/// Ascending eigenvalues and orthonormal eigenvectors (column j <-> E_j).
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;

  std::size_t size() const noexcept { return eigenvalues.size(); }
};

inline SpectralDecomposition eigendecompose(const Matrix& h) {
  SymmetricEigen eig = jacobi_eigen(h);
  return {std::move(eig.values), std::move(eig.vectors)};
}

inline SpectralDecomposition eigendecompose(const SectorHamiltonian& h) {
  return eigendecompose(h.matrix);
}

inline SpectralDecomposition eigendecompose(const FullHamiltonian& h) {
  return eigendecompose(h.matrix);
}

namespace detail {

inline void check_index(const SpectralDecomposition& d, std::size_t k, const char* what) {
  if (k >= d.size()) {
    std::ostringstream msg;
    msg << what << ": index " << k << " out of range for dimension " << d.size();
    throw std::out_of_range(msg.str());
  }
}

inline Complex phase(double energy, double t) {
  const double arg = -energy * t;
  return {std::cos(arg), std::sin(arg)};
}

}  // namespace detail

/// <to| exp(-iHt) |from> in the eigenbasis of `d`.
inline Complex propagator_amplitude(const SpectralDecomposition& d, std::size_t from,
                                    std::size_t to, double t) {
  detail::check_index(d, from, "propagator_amplitude");
  detail::check_index(d, to, "propagator_amplitude");
  Complex acc{0.0, 0.0};
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double w = d.eigenvectors(to, j) * d.eigenvectors(from, j);
    if (w == 0.0) continue;
    acc += w * detail::phase(d.eigenvalues[j], t);
  }
  return acc;
}

/// Every amplitude f_{from,n}(t), n = 0..N-1.
inline std::vector<Complex> propagator_row(const SpectralDecomposition& d, std::size_t from,
                                           double t) {
  detail::check_index(d, from, "propagator_row");
  const std::size_t n = d.size();
  std::vector<Complex> phases(n);
  for (std::size_t j = 0; j < n; ++j)
    phases[j] = d.eigenvectors(from, j) * detail::phase(d.eigenvalues[j], t);
  std::vector<Complex> row(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) acc += d.eigenvectors(k, j) * phases[j];
    row[k] = acc;
  }
  return row;
}

/// One time point of the sender/receiver amplitudes. channel_norm_sq is the
/// probability left on every other site.
struct AmplitudeSample {
  double t = 0.0;
  Complex f_ss;
  Complex f_sr;
  double channel_norm_sq = 0.0;
};

inline constexpr double kConservationTolerance = 1e-10;

/// Evaluates f_ss and f_sr over a time grid. The channel weight is
/// 1 - |f_ss|^2 - |f_sr|^2, clamped to [0, 1]; an excursion beyond
/// kConservationTolerance is a NumericalError.
inline std::vector<AmplitudeSample> amplitude_series(const SpectralDecomposition& d,
                                                     std::size_t s, std::size_t r,
                                                     std::span<const double> times) {
  if (times.empty()) throw std::invalid_argument("amplitude_series: empty time grid");
  detail::check_index(d, s, "amplitude_series");
  detail::check_index(d, r, "amplitude_series");

  const std::size_t n = d.size();
  std::vector<double> w_ss(n), w_sr(n);
  for (std::size_t j = 0; j < n; ++j) {
    w_ss[j] = d.eigenvectors(s, j) * d.eigenvectors(s, j);
    w_sr[j] = d.eigenvectors(r, j) * d.eigenvectors(s, j);
  }

  std::vector<AmplitudeSample> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!std::isfinite(t)) throw std::invalid_argument("amplitude_series: non-finite time");
    AmplitudeSample sample;
    sample.t = t;
    for (std::size_t j = 0; j < n; ++j) {
      const Complex ph = detail::phase(d.eigenvalues[j], t);
      sample.f_ss += w_ss[j] * ph;
      sample.f_sr += w_sr[j] * ph;
    }
    const double rest = 1.0 - std::norm(sample.f_ss) - std::norm(sample.f_sr);
    if (rest < -kConservationTolerance || rest > 1.0 + kConservationTolerance) {
      std::ostringstream msg;
      msg << "amplitude_series: probability not conserved at t=" << t << " (channel weight "
          << rest << ")";
      throw NumericalError(msg.str());
    }
    sample.channel_norm_sq = std::clamp(rest, 0.0, 1.0);
    out.push_back(sample);
  }
  return out;
}

/// Amplitude between the full-space basis states with a single up-spin on
/// `from` and on `to`. `d` must decompose a 2^N-dimensional FullHamiltonian.
inline Complex full_space_amplitude(const SpectralDecomposition& d, std::size_t from,
                                    std::size_t to, double t) {
  const std::size_t dim = d.size();
  if (dim < 2 || !std::has_single_bit(dim))
    throw std::invalid_argument("full_space_amplitude: dimension is not a power of two");
  const auto spins = static_cast<std::size_t>(std::countr_zero(dim));
  if (from >= spins || to >= spins) {
    std::ostringstream msg;
    msg << "full_space_amplitude: site out of range for " << spins << " spins";
    throw std::out_of_range(msg.str());
  }
  return propagator_amplitude(d, FullHamiltonian::single_excitation_index(from),
                              FullHamiltonian::single_excitation_index(to), t);
}

/// n evenly spaced points covering [0, t_max].
inline std::vector<double> uniform_grid(double t_max, std::size_t points) {
  if (points < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
  if (!(t_max > 0.0) || !std::isfinite(t_max))
    throw std::invalid_argument("uniform_grid: t_max must be positive and finite");
  std::vector<double> grid(points);
  const double step = t_max / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) grid[k] = step * static_cast<double>(k);
  grid.back() = t_max;
  return grid;
}

}  // namespace spinchain

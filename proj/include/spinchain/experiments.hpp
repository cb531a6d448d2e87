#pragma once

// Time scans of fidelity/concurrence and maximum-concurrence-vs-size scans.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinchain/dynamics.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/metrics.hpp"
#include "spinchain/model.hpp"

namespace spinchain {

inline constexpr std::size_t kDefaultGridPoints = 2000;
/// Golden-section refinement stops once the bracket is narrower than this
/// fraction of the scan window.
inline constexpr double kRefineRelativeTolerance = 1e-8;
/// Refined peaks closer than this count as equal; the earlier one wins.
inline constexpr double kPeakTieTolerance = 1e-9;
/// Peaks are searched on a grid with at least this many samples per period
/// of the fastest frequency in the spectrum, independent of the output grid.
inline constexpr double kSearchSamplesPerPeriod = 16.0;

struct Peak {
  double t = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of `f` on [lo, hi], stopping when
/// the bracket is narrower than `tolerance`. Equal interior values shrink the
/// bracket from both sides, so a plateau resolves to the bracket midpoint.
inline Peak refine_peak(const std::function<double(double)>& f, double lo, double hi,
                        double tolerance) {
  if (!(hi >= lo)) throw std::invalid_argument("refine_peak: empty bracket");
  if (!(tolerance > 0.0)) throw std::invalid_argument("refine_peak: tolerance must be positive");
  auto eval = [&](double t) {
    const double v = f(t);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "refine_peak: evaluator returned " << v << " at t=" << t;
      throw NumericalError(msg.str());
    }
    return v;
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > tolerance) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else if (fd > fc) {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    } else {
      a = c;
      b = d;
      c = b - inv_phi * (b - a);
      d = a + inv_phi * (b - a);
      fc = eval(c);
      fd = eval(d);
    }
  }
  const double t = 0.5 * (a + b);
  return {t, eval(t)};
}

/// Everything derived from one chain's spectrum.
struct ChainAnalysis {
  CouplingMatrix couplings;
  SectorHamiltonian hamiltonian;
  SpectralDecomposition spectrum;
  SpectralOverlaps overlaps;
  EffectiveTwoQubit effective;
  LeakageBound leakage;
};

inline ChainAnalysis analyze_chain(const ChainGeometry& geometry, const CouplingModel& model,
                                   bool include_zz) {
  CouplingMatrix j = build_couplings(geometry, model);
  SectorHamiltonian h = sector_hamiltonian(j, include_zz);
  SpectralDecomposition d = eigendecompose(h);
  SpectralOverlaps o = spectral_overlaps(d, geometry.sender(), geometry.receiver());
  EffectiveTwoQubit e = two_qubit_effective(d, o);
  LeakageBound l = leakage_bound(o);
  return {std::move(j), std::move(h), std::move(d), std::move(o), std::move(e), l};
}

struct TimeScanSpec {
  ChainGeometry geometry;
  CouplingModel coupling;
  bool include_zz = true;
  InitialStateParams initial;
  /// Defaults to 1.5 pi / Delta_eff, or 2 pi / lambda for mirror-periodic chains.
  std::optional<double> t_max;
  std::size_t grid_points = kDefaultGridPoints;
};

struct ScanSample {
  double t = 0.0;
  double fidelity = 0.0;
  double averaged_fidelity = 0.0;
  double concurrence = 0.0;
  double dispersion = 0.0;
  Complex f_ss;
  Complex f_sr;
};

struct TimeScanResult {
  std::vector<ScanSample> samples;
  Peak peak_fidelity;
  Peak peak_concurrence;
  double t_max = 0.0;
  /// Set when a peak sat on the end of the initial window and the window was doubled.
  bool extended = false;
  EffectiveTwoQubit effective;
  LeakageBound leakage;
};

namespace detail {

inline ScanSample make_sample(const AmplitudeSample& a, const InitialStateParams& init) {
  ScanSample s;
  s.t = a.t;
  s.f_ss = a.f_ss;
  s.f_sr = a.f_sr;
  s.fidelity = transfer_fidelity(a.f_sr);
  s.averaged_fidelity = averaged_fidelity(a.f_sr);
  s.concurrence = concurrence_closed_form(init, a.f_ss, a.f_sr);
  s.dispersion = a.channel_norm_sq;
  return s;
}

// Grid local maxima within a relative 1e-3 of the grid maximum, in time order.
inline std::vector<std::size_t> peak_candidates(const std::vector<double>& values) {
  const double top = *std::max_element(values.begin(), values.end());
  const double floor = top - 1e-3 * std::max(std::abs(top), 1e-300);
  std::vector<std::size_t> out;
  const std::size_t last = values.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    const double v = values[k];
    if (v < floor) continue;
    if (k > 0 && values[k - 1] > v) continue;
    if (k < last && values[k + 1] > v) continue;
    out.push_back(k);
  }
  return out;
}

// Points for the peak search on [0, t_max]: a multiple of the output grid
// fine enough to resolve the fastest oscillation, E_max - E_min.
inline std::size_t search_points(const SpectralDecomposition& d, double t_max,
                                 std::size_t grid_points) {
  const double bandwidth = d.eigenvalues.back() - d.eigenvalues.front();
  if (!(bandwidth > 0.0)) return grid_points;
  const double step = 2.0 * std::numbers::pi / (bandwidth * kSearchSamplesPerPeriod);
  const double needed = std::ceil(t_max / step);
  const double factor =
      std::max(1.0, std::ceil(needed / static_cast<double>(grid_points - 1)));
  return static_cast<std::size_t>(factor) * (grid_points - 1) + 1;
}

}  // namespace detail

inline TimeScanResult time_scan(const TimeScanSpec& spec) {
  spec.initial.validate();
  if (spec.grid_points < 2) throw std::invalid_argument("time_scan: grid_points must be >= 2");
  if (spec.t_max && !(*spec.t_max > 0.0 && std::isfinite(*spec.t_max)))
    throw std::invalid_argument("time_scan: t_max must be positive");

  const ChainAnalysis chain = analyze_chain(spec.geometry, spec.coupling, spec.include_zz);
  const std::size_t s = spec.geometry.sender();
  const std::size_t r = spec.geometry.receiver();

  double t_max = 0.0;
  if (spec.t_max)
    t_max = *spec.t_max;
  else if (spec.coupling.kind == CouplingKind::mirror_periodic)
    t_max = 2.0 * std::numbers::pi / spec.coupling.lambda;
  else
    t_max = 1.5 * chain.effective.prediction.transfer_time;

  auto sample_at = [&](double t) {
    const double one[] = {t};
    return detail::make_sample(amplitude_series(chain.spectrum, s, r, one).front(), spec.initial);
  };
  auto fidelity_field = [](const ScanSample& x) { return x.fidelity; };
  auto concurrence_field = [](const ScanSample& x) { return x.concurrence; };

  TimeScanResult out;
  out.effective = chain.effective;
  out.leakage = chain.leakage;

  // Refines every candidate of the search grid and keeps the largest refined
  // value; values within kPeakTieTolerance of each other resolve to the
  // earliest time. The result never falls below an output sample.
  struct Located {
    Peak peak;
    bool at_end = false;
  };
  auto locate = [&](auto field, const std::vector<double>& times,
                    const std::vector<double>& values) {
    const double tolerance = kRefineRelativeTolerance * out.t_max;
    std::optional<Located> best;
    for (std::size_t k : detail::peak_candidates(values)) {
      const double lo = times[k == 0 ? 0 : k - 1];
      const double hi = times[std::min(k + 1, times.size() - 1)];
      Peak p = refine_peak([&](double t) { return field(sample_at(t)); }, lo, hi, tolerance);
      if (p.value < values[k]) p = {times[k], values[k]};
      if (!best || p.value > best->peak.value + kPeakTieTolerance)
        best = Located{p, k == times.size() - 1};
    }
    for (const auto& x : out.samples)
      if (field(x) > best->peak.value) best->peak = {x.t, field(x)};
    return *best;
  };

  for (int attempt = 0;; ++attempt) {
    const std::vector<double> grid = uniform_grid(t_max, spec.grid_points);
    const auto amps = amplitude_series(chain.spectrum, s, r, grid);
    out.samples.clear();
    out.samples.reserve(amps.size());
    for (const auto& a : amps) out.samples.push_back(detail::make_sample(a, spec.initial));
    out.t_max = t_max;

    const std::size_t fine = detail::search_points(chain.spectrum, t_max, spec.grid_points);
    std::vector<double> times = grid;
    std::vector<double> fid, conc;
    if (fine == spec.grid_points) {
      for (const auto& x : out.samples) {
        fid.push_back(x.fidelity);
        conc.push_back(x.concurrence);
      }
    } else {
      times = uniform_grid(t_max, fine);
      for (const auto& a : amplitude_series(chain.spectrum, s, r, times)) {
        const ScanSample x = detail::make_sample(a, spec.initial);
        fid.push_back(x.fidelity);
        conc.push_back(x.concurrence);
      }
    }

    const Located f = locate(fidelity_field, times, fid);
    const Located c = locate(concurrence_field, times, conc);
    if (attempt == 0 && !spec.t_max && (f.at_end || c.at_end)) {
      t_max *= 2.0;
      out.extended = true;
      continue;
    }
    out.peak_fidelity = f.peak;
    out.peak_concurrence = c.peak;
    break;
  }
  return out;
}

enum class ChainConfiguration { complete, double_hole };

inline std::string_view to_string(ChainConfiguration c) {
  return c == ChainConfiguration::complete ? "complete" : "double_hole";
}

/// n spins with sender and receiver at the ends. The double-hole chain spans
/// n + 2 lattice positions.
inline ChainGeometry end_to_end_geometry(int n_spins, ChainConfiguration c) {
  if (n_spins < 2) throw std::invalid_argument("end_to_end_geometry: need n_spins >= 2");
  if (c == ChainConfiguration::complete) return build_chain_geometry(n_spins, 1, n_spins, false);
  return build_chain_geometry(n_spins + 2, 1, n_spins + 2, true);
}

struct SizeScanSpec {
  int n_min = 6;
  int n_max = 14;
  CouplingModel coupling;
  bool include_zz = true;
  std::vector<ChainConfiguration> configurations{ChainConfiguration::complete,
                                                 ChainConfiguration::double_hole};
  InitialStateParams initial;
  std::size_t grid_points = kDefaultGridPoints;
};

struct SizeScanRow {
  int n_spins = 0;
  ChainConfiguration configuration = ChainConfiguration::complete;
  double max_concurrence = 0.0;
  double t_at_max = 0.0;
  double max_fidelity = 0.0;
  double t_at_max_f = 0.0;
};

struct SizeScanResult {
  std::vector<SizeScanRow> rows;
};

/// One default time scan per (n, configuration), ordered by n and then by
/// the order of spec.configurations.
inline SizeScanResult size_scan(const SizeScanSpec& spec) {
  if (spec.n_min < 2 || spec.n_max < spec.n_min)
    throw std::invalid_argument("size_scan: need 2 <= n_min <= n_max");
  if (spec.configurations.empty()) throw std::invalid_argument("size_scan: no configurations");
  SizeScanResult out;
  for (int n = spec.n_min; n <= spec.n_max; ++n) {
    for (ChainConfiguration c : spec.configurations) {
      TimeScanSpec ts{end_to_end_geometry(n, c), spec.coupling, spec.include_zz, spec.initial,
                      std::nullopt, spec.grid_points};
      const TimeScanResult scan = time_scan(ts);
      out.rows.push_back({n, c, scan.peak_concurrence.value, scan.peak_concurrence.t,
                          scan.peak_fidelity.value, scan.peak_fidelity.t});
    }
  }
  return out;
}

}  // namespace spinchain

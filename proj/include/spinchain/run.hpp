#pragma once

// Executes a RunConfig and serializes the results as CSV.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <locale>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "spinchain/config.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/experiments.hpp"
#include "spinchain/metrics.hpp"
#include "spinchain/model.hpp"

namespace spinchain {

/// Shortest round-trip-safe text with 17 significant digits, independent of
/// the global locale.
inline std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("format_real: buffer too small");
  return std::string(buf, ptr);
}

inline constexpr const char* kTimeScanHeader =
    "t,re_f_ss,im_f_ss,re_f_sr,im_f_sr,fidelity,avg_fidelity,concurrence,dispersion";
inline constexpr const char* kSizeScanHeader =
    "n_spins,configuration,max_concurrence,t_at_max,max_fidelity,t_at_max_f";
inline constexpr const char* kDiagnosticsHeader = "j,E_j,sigma_sq,rho_sq,gamma_sq,residual";

class CsvWriter {
public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const char* line) { out_ << line << '\n'; }

  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

private:
  static std::string cell(double x) { return format_real(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(std::string_view x) { return std::string(x); }

  std::ostream& out_;
};

inline void write_time_scan_csv(std::ostream& out, const TimeScanResult& r) {
  CsvWriter csv(out);
  csv.header(kTimeScanHeader);
  for (const auto& s : r.samples)
    csv.row(s.t, s.f_ss.real(), s.f_ss.imag(), s.f_sr.real(), s.f_sr.imag(), s.fidelity,
            s.averaged_fidelity, s.concurrence, s.dispersion);
}

inline void write_size_scan_csv(std::ostream& out, const SizeScanResult& r) {
  CsvWriter csv(out);
  csv.header(kSizeScanHeader);
  for (const auto& row : r.rows)
    csv.row(row.n_spins, to_string(row.configuration), row.max_concurrence, row.t_at_max,
            row.max_fidelity, row.t_at_max_f);
}

inline void write_diagnostics_csv(std::ostream& out, const ChainAnalysis& a) {
  CsvWriter csv(out);
  csv.header(kDiagnosticsHeader);
  const auto& o = a.overlaps;
  for (std::size_t j = 0; j < o.size(); ++j)
    csv.row(j, a.spectrum.eigenvalues[j], o.sigma[j] * o.sigma[j], o.rho[j] * o.rho[j],
            o.gamma_sq[j], a.effective.residuals[j]);
}

/// Builds the chain and coupling model a config describes. Constructor
/// precondition failures surface as ConfigError.
inline ChainGeometry config_geometry(const RunConfig& cfg) {
  if (!cfg.geometry) throw ConfigError("geometry: not specified");
  try {
    const auto& g = *cfg.geometry;
    return build_chain_geometry(g.total_positions, g.sender, g.receiver, g.double_hole);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
}

inline CouplingModel config_coupling(const RunConfig& cfg) {
  CouplingModel m;
  m.kind = cfg.coupling;
  m.nu = cfg.nu;
  m.strength = cfg.strength;
  m.spacing = cfg.spacing;
  m.lambda = cfg.lambda;
  if (cfg.coupling == CouplingKind::custom) {
    try {
      m.custom = load_coupling_matrix(cfg.custom_file.string());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("custom_file: ") + e.what());
    }
  }
  return m;
}

namespace detail {

inline void write_summary_common(std::ostream& s, const RunConfig& cfg) {
  s << "mode: " << to_string(cfg.mode) << '\n';
  if (cfg.geometry)
    s << "lattice: " << cfg.geometry->total_positions << " positions, sender "
      << cfg.geometry->sender << ", receiver " << cfg.geometry->receiver
      << (cfg.geometry->double_hole ? ", double hole" : "") << '\n';
  s << "zz diagonal: " << (cfg.include_zz ? "on" : "off") << '\n';
}

inline void write_spectral_summary(std::ostream& s, std::size_t spins,
                                   const EffectiveTwoQubit& eff, const LeakageBound& leak) {
  s << "spins: " << spins << '\n';
  s << "delta_eff: " << format_real(eff.prediction.delta) << '\n';
  s << "predicted transfer time: " << format_real(eff.prediction.transfer_time) << '\n';
  s << "predicted entangling time: " << format_real(eff.prediction.entangling_time) << '\n';
  s << "dominant pair: " << eff.dominant_pair[0] << ", " << eff.dominant_pair[1]
    << " (sender mass " << format_real(eff.dominant_mass) << ")\n";
  s << "gamma_M: " << format_real(leak.gamma_m) << " (dispersion bound "
    << format_real(leak.bound) << ")\n";
}

// Writes through a temporary file that is renamed into place on success and
// removed otherwise.
template <class Body>
void write_atomically(const std::filesystem::path& target, Body&& body) {
  std::filesystem::path tmp = target;
  tmp += ".partial";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
      out.imbue(std::locale::classic());
      body(out);
      out.flush();
      if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

}  // namespace detail

struct RunReport {
  std::vector<std::filesystem::path> files;
  std::string summary;
};

/// Runs the configured study, writing `<output>` (CSV) and
/// `<output stem>_summary.txt` into `out_dir`. Any failure leaves no output
/// files behind.
inline RunReport run(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir.string() + "'");

  const std::filesystem::path csv_path = out_dir / cfg.output_name();
  std::filesystem::path summary_path = out_dir / csv_path.stem();
  summary_path += "_summary.txt";

  std::ostringstream summary;
  summary.imbue(std::locale::classic());
  detail::write_summary_common(summary, cfg);
  std::function<void(std::ostream&)> emit_csv;

  switch (cfg.mode) {
    case RunMode::time_scan: {
      TimeScanSpec spec{config_geometry(cfg), config_coupling(cfg), cfg.include_zz, cfg.initial,
                        cfg.t_max, cfg.grid_points};
      auto result = std::make_shared<TimeScanResult>(time_scan(spec));
      detail::write_spectral_summary(summary, spec.geometry.size(), result->effective,
                                     result->leakage);
      summary << "t_max: " << format_real(result->t_max)
              << (result->extended ? " (extended after a boundary peak)" : "") << '\n';
      summary << "peak fidelity: " << format_real(result->peak_fidelity.value) << " at t = "
              << format_real(result->peak_fidelity.t) << '\n';
      summary << "peak concurrence: " << format_real(result->peak_concurrence.value)
              << " at t = " << format_real(result->peak_concurrence.t) << '\n';
      emit_csv = [result](std::ostream& out) { write_time_scan_csv(out, *result); };
      break;
    }
    case RunMode::size_scan: {
      SizeScanSpec spec;
      spec.n_min = cfg.n_min;
      spec.n_max = cfg.n_max;
      spec.coupling = config_coupling(cfg);
      spec.include_zz = cfg.include_zz;
      spec.configurations = cfg.configurations;
      spec.initial = cfg.initial;
      spec.grid_points = cfg.grid_points;
      auto result = std::make_shared<SizeScanResult>(size_scan(spec));
      for (const auto& row : result->rows)
        summary << "n = " << row.n_spins << ' ' << to_string(row.configuration)
                << ": max concurrence " << format_real(row.max_concurrence) << ", max fidelity "
                << format_real(row.max_fidelity) << '\n';
      emit_csv = [result](std::ostream& out) { write_size_scan_csv(out, *result); };
      break;
    }
    case RunMode::diagnostics: {
      const ChainGeometry g = config_geometry(cfg);
      auto a = std::make_shared<ChainAnalysis>(analyze_chain(g, config_coupling(cfg), cfg.include_zz));
      detail::write_spectral_summary(summary, a->spectrum.size(), a->effective, a->leakage);
      summary << "gamma_M under symmetric overlaps: " << format_real(leakage_under_symmetry(a->overlaps))
              << '\n';
      emit_csv = [a](std::ostream& out) { write_diagnostics_csv(out, *a); };
      break;
    }
  }

  RunReport report;
  report.summary = summary.str();
  try {
    detail::write_atomically(csv_path, emit_csv);
    report.files.push_back(csv_path);
    detail::write_atomically(summary_path, [&](std::ostream& out) { out << report.summary; });
    report.files.push_back(summary_path);
  } catch (...) {
    for (const auto& p : report.files) std::filesystem::remove(p, ec);
    throw;
  }
  return report;
}

}  // namespace spinchain

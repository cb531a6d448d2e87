#pragma once

// Flat `key = value` run descriptions. One assignment per line; `#` starts a
// comment. Keys:
//
//   mode            time_scan | size_scan | diagnostics        (required)
//   positions       lattice size (sender/receiver default to its ends)
//   spins           occupied spins; with dh = true the lattice is spins + 2
//   sender          lattice position of the sender           (default 1)
//   receiver        lattice position of the receiver         (default last)
//   dh              leave the sites next to sender and receiver empty
//   coupling        power_law | mirror_periodic | custom     (default power_law)
//   nu, C, a        power-law exponent, strength, spacing   (default 3, 1, 1)
//   lambda          mirror-periodic scale                    (default 2)
//   custom_file     coupling matrix file, relative to the config file
//   zz              keep the Ising diagonal                  (default true)
//   theta, phi      initial Bloch angles                     (default pi, 0)
//   t_max           scan window; default derived from the spectrum
//   grid_points     samples per time scan                    (default 2000)
//   n_min, n_max    size-scan range of spin counts           (default 6, 14)
//   configurations  comma list of complete, double_hole      (default both)
//   output          CSV file name inside the output directory

#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "spinchain/errors.hpp"
#include "spinchain/experiments.hpp"
#include "spinchain/model.hpp"

namespace spinchain {

enum class RunMode { time_scan, size_scan, diagnostics };

inline std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::time_scan:
      return "time_scan";
    case RunMode::size_scan:
      return "size_scan";
    case RunMode::diagnostics:
      return "diagnostics";
  }
  return "?";
}

struct GeometrySpec {
  int total_positions = 0;
  int sender = 1;
  int receiver = 0;
  bool double_hole = false;
};

struct RunConfig {
  RunMode mode = RunMode::time_scan;
  std::optional<GeometrySpec> geometry;  // absent for size scans
  CouplingKind coupling = CouplingKind::power_law;
  double nu = 3.0;
  double strength = 1.0;
  double spacing = 1.0;
  double lambda = 2.0;
  std::filesystem::path custom_file;
  bool include_zz = true;
  InitialStateParams initial;
  std::optional<double> t_max;
  std::size_t grid_points = kDefaultGridPoints;
  int n_min = 6;
  int n_max = 14;
  std::vector<ChainConfiguration> configurations{ChainConfiguration::complete,
                                                 ChainConfiguration::double_hole};
  std::string output;

  std::string output_name() const {
    return output.empty() ? std::string(to_string(mode)) + ".csv" : output;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] inline void config_fail(int line, const std::string& what) {
  std::ostringstream msg;
  if (line > 0) msg << "line " << line << ": ";
  msg << what;
  throw ConfigError(msg.str());
}

struct Entry {
  std::string value;
  int line = 0;
};

class Fields {
public:
  explicit Fields(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<Entry> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    Entry e = it->second;
    entries_.erase(it);
    return e;
  }

  std::optional<double> real(const std::string& key) {
    auto e = take(key);
    if (!e) return std::nullopt;
    double v = 0.0;
    const char* b = e->value.data();
    const char* end = b + e->value.size();
    auto [ptr, ec] = std::from_chars(b, end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v))
      config_fail(e->line, key + ": expected a finite real number, got '" + e->value + "'");
    return v;
  }

  std::optional<long long> integer(const std::string& key) {
    auto e = take(key);
    if (!e) return std::nullopt;
    long long v = 0;
    const char* b = e->value.data();
    const char* end = b + e->value.size();
    auto [ptr, ec] = std::from_chars(b, end, v);
    if (ec != std::errc{} || ptr != end)
      config_fail(e->line, key + ": expected an integer, got '" + e->value + "'");
    return v;
  }

  std::optional<bool> boolean(const std::string& key) {
    auto e = take(key);
    if (!e) return std::nullopt;
    const std::string& v = e->value;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    config_fail(e->line, key + ": expected true or false, got '" + v + "'");
  }

  const std::map<std::string, Entry>& remaining() const { return entries_; }

private:
  std::map<std::string, Entry> entries_;
};

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace detail

/// Parses and validates a run description. Relative custom_file paths are
/// resolved against `base_dir`.
inline RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
  using detail::config_fail;
  using detail::require;

  std::map<std::string, detail::Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      config_fail(line_no, "expected 'key = value', got '" + std::string(line) + "'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) config_fail(line_no, "missing key before '='");
    if (value.empty()) config_fail(line_no, "missing value for '" + key + "'");
    if (entries.count(key)) config_fail(line_no, "duplicate key '" + key + "'");
    entries.emplace(key, detail::Entry{value, line_no});
  }

  detail::Fields f(std::move(entries));
  RunConfig cfg;

  const auto mode = f.take("mode");
  if (!mode) config_fail(0, "missing required key 'mode'");
  if (mode->value == "time_scan")
    cfg.mode = RunMode::time_scan;
  else if (mode->value == "size_scan")
    cfg.mode = RunMode::size_scan;
  else if (mode->value == "diagnostics")
    cfg.mode = RunMode::diagnostics;
  else
    config_fail(mode->line, "mode: expected time_scan, size_scan or diagnostics, got '" +
                                mode->value + "'");

  if (auto c = f.take("coupling")) {
    if (c->value == "power_law")
      cfg.coupling = CouplingKind::power_law;
    else if (c->value == "mirror_periodic")
      cfg.coupling = CouplingKind::mirror_periodic;
    else if (c->value == "custom")
      cfg.coupling = CouplingKind::custom;
    else
      config_fail(c->line, "coupling: expected power_law, mirror_periodic or custom, got '" +
                               c->value + "'");
  }
  if (auto v = f.real("nu")) cfg.nu = *v;
  if (auto v = f.real("C")) cfg.strength = *v;
  if (auto v = f.real("a")) cfg.spacing = *v;
  if (auto v = f.real("lambda")) cfg.lambda = *v;
  require(cfg.nu > 0.0, "nu: must satisfy nu > 0 (got " + std::to_string(cfg.nu) + ")");
  require(cfg.strength > 0.0, "C: must satisfy C > 0");
  require(cfg.spacing > 0.0, "a: must satisfy a > 0");
  require(cfg.lambda > 0.0, "lambda: must satisfy lambda > 0");
  if (auto p = f.take("custom_file")) {
    std::filesystem::path path(p->value);
    cfg.custom_file = path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  }
  require(cfg.coupling != CouplingKind::custom || !cfg.custom_file.empty(),
          "custom_file: required when coupling = custom");

  if (auto v = f.boolean("zz")) cfg.include_zz = *v;
  if (auto v = f.real("theta")) cfg.initial.theta = *v;
  if (auto v = f.real("phi")) cfg.initial.phi = *v;
  require(cfg.initial.theta >= 0.0 && cfg.initial.theta <= std::numbers::pi,
          "theta: must lie in [0, pi]");
  require(cfg.initial.phi >= 0.0 && cfg.initial.phi < 2.0 * std::numbers::pi,
          "phi: must lie in [0, 2pi)");

  if (auto v = f.real("t_max")) {
    require(*v > 0.0, "t_max: must be > 0");
    cfg.t_max = *v;
  }
  if (auto v = f.integer("grid_points")) {
    require(*v >= 2, "grid_points: must be >= 2");
    cfg.grid_points = static_cast<std::size_t>(*v);
  }

  const bool has_positions = f.has("positions");
  const bool has_spins = f.has("spins");
  const auto positions = f.integer("positions");
  const auto spins = f.integer("spins");
  const auto sender = f.integer("sender");
  const auto receiver = f.integer("receiver");
  const auto dh = f.boolean("dh");
  if (cfg.mode == RunMode::size_scan) {
    require(!has_positions && !has_spins && !sender && !receiver && !dh,
            "size_scan: geometry keys (positions, spins, sender, receiver, dh) do not apply");
  } else {
    require(has_positions != has_spins, "geometry: give exactly one of 'positions' or 'spins'");
    GeometrySpec g;
    g.double_hole = dh.value_or(false);
    if (positions) {
      require(*positions >= 2, "positions: must be >= 2");
      g.total_positions = static_cast<int>(*positions);
    } else {
      require(*spins >= 2, "spins: must be >= 2");
      g.total_positions = static_cast<int>(*spins) + (g.double_hole ? 2 : 0);
    }
    g.sender = static_cast<int>(sender.value_or(1));
    g.receiver = static_cast<int>(receiver.value_or(g.total_positions));
    require(g.sender >= 1 && g.sender < g.receiver && g.receiver <= g.total_positions,
            "sender/receiver: need 1 <= sender < receiver <= positions");
    require(!g.double_hole || g.receiver - g.sender >= 2,
            "dh: needs receiver - sender >= 2 so the holes miss sender and receiver");
    cfg.geometry = g;
  }

  if (auto v = f.integer("n_min")) cfg.n_min = static_cast<int>(*v);
  if (auto v = f.integer("n_max")) cfg.n_max = static_cast<int>(*v);
  require(cfg.n_min >= 2, "n_min: must be >= 2");
  require(cfg.n_max >= cfg.n_min, "n_max: must be >= n_min");
  if (auto c = f.take("configurations")) {
    cfg.configurations.clear();
    std::set<std::string> seen;
    std::string_view rest = c->value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string item(detail::trim(rest.substr(0, comma)));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (!seen.insert(item).second)
        config_fail(c->line, "configurations: duplicate entry '" + item + "'");
      if (item == "complete")
        cfg.configurations.push_back(ChainConfiguration::complete);
      else if (item == "double_hole")
        cfg.configurations.push_back(ChainConfiguration::double_hole);
      else
        config_fail(c->line, "configurations: expected complete or double_hole, got '" + item + "'");
    }
    require(!cfg.configurations.empty(), "configurations: empty list");
  }
  if (auto o = f.take("output")) {
    const std::filesystem::path p(o->value);
    require(p.filename() == p && p != "." && p != "..",
            "output: must be a plain file name, got '" + o->value + "'");
    cfg.output = o->value;
  }

  if (!f.remaining().empty()) {
    std::ostringstream msg;
    msg << "unknown key(s):";
    for (const auto& [key, e] : f.remaining()) msg << " '" << key << "' (line " << e.line << ")";
    throw ConfigError(msg.str());
  }
  return cfg;
}

}  // namespace spinchain

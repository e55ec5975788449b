#pragma once

// Run configuration and its key=value file format.
//
//   # comment
//   preset = fp-toy
//   scheme = centered
//   level = 2
//
//   [pme-fill]        # keys below apply only when the preset is pme-fill
//   m = 3
//
// Unknown keys and malformed values are ParseErrors carrying the line number.

#include "entrofv/core.hpp"
#include "entrofv/mesh_io.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace entrofv::cli {

struct RunConfig
{
  std::string preset;
  std::optional<std::string> scheme;
  std::optional<int> level;
  std::optional<double> dt;          // fixes dt0 = dt_max = dt
  std::optional<double> final_time;
  std::optional<double> dt_min;
  std::optional<double> dt_max;
  std::optional<double> dt0;
  std::optional<double> entropy_floor;
  std::optional<double> newton_tolerance;
  std::optional<int> newton_max_iterations;
  std::optional<double> m;           // PME exponent
  std::optional<double> m_d;         // PME Dirichlet level (pme-sweep)
  std::optional<double> lambda;      // Debye length
  std::optional<double> bias;        // potential bias on the contacts
  std::optional<double> doping_n;    // C in the N-region
  std::optional<double> doping_p;    // C in the P-region
  bool force_peclet = false;
  std::string out_dir = ".";
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_bool(std::string_view v, std::size_t line)
{
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError(line, "expected a boolean, got '" + std::string(v) + "'");
}

}  // namespace detail

/// Sets one key; `line` is used in error messages (0 for command-line values).
inline void set_option(RunConfig& cfg, std::string_view key, std::string_view value, std::size_t line = 0)
{
  using entrofv::detail::parse_double;
  const auto number = [&] { return parse_double(value, line); };
  const auto integer = [&] { return static_cast<int>(entrofv::detail::parse_index(value, line)); };
  if (key == "preset") cfg.preset = std::string(value);
  else if (key == "scheme") cfg.scheme = std::string(value);
  else if (key == "level") cfg.level = integer();
  else if (key == "dt") cfg.dt = number();
  else if (key == "final_time" || key == "T") cfg.final_time = number();
  else if (key == "dt_min") cfg.dt_min = number();
  else if (key == "dt_max") cfg.dt_max = number();
  else if (key == "dt0") cfg.dt0 = number();
  else if (key == "entropy_floor") cfg.entropy_floor = number();
  else if (key == "newton_tolerance") cfg.newton_tolerance = number();
  else if (key == "newton_max_iterations") cfg.newton_max_iterations = integer();
  else if (key == "m") cfg.m = number();
  else if (key == "m_d" || key == "mD") cfg.m_d = number();
  else if (key == "lambda") cfg.lambda = number();
  else if (key == "bias") cfg.bias = number();
  else if (key == "doping_n") cfg.doping_n = number();
  else if (key == "doping_p") cfg.doping_p = number();
  else if (key == "force_peclet") cfg.force_peclet = detail::parse_bool(value, line);
  else if (key == "out") cfg.out_dir = std::string(value);
  else throw ParseError(line, "unknown key '" + std::string(key) + "'");
}

inline RunConfig parse_config(std::string_view text)
{
  RunConfig cfg;
  struct Entry
  {
    std::string section, key, value;
    std::size_t line;
  };
  std::vector<Entry> entries;
  std::string section;
  std::size_t number = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    pos = end + 1;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = detail::trim(raw);
    if (raw.empty()) continue;
    if (raw.front() == '[') {
      if (raw.back() != ']') throw ParseError(number, "unterminated section header");
      section = std::string(detail::trim(raw.substr(1, raw.size() - 2)));
      continue;
    }
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) throw ParseError(number, "expected 'key = value'");
    const auto key = detail::trim(raw.substr(0, eq));
    const auto value = detail::trim(raw.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(number, "expected 'key = value'");
    entries.push_back({section, std::string(key), std::string(value), number});
  }
  // Global keys first (they pick the preset), then the matching section.
  for (const auto& e : entries)
    if (e.section.empty()) set_option(cfg, e.key, e.value, e.line);
  if (cfg.preset.empty()) throw ParseError(0, "config does not name a preset");
  for (const auto& e : entries)
    if (!e.section.empty() && e.section == cfg.preset) set_option(cfg, e.key, e.value, e.line);
  return cfg;
}

}  // namespace entrofv::cli

#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "detlat/cells.hpp"
#include "detlat/centroids.hpp"
#include "detlat/lattice_graph.hpp"
#include "detlat/synthgen.hpp"

namespace detlat {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

inline double to_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw ConfigError("config: " + key + " is not a number: '" + v + "'");
  return x;
}

inline long long to_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const long long x = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    throw ConfigError("config: " + key + " is not an integer: '" + v + "'");
  return x;
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const unsigned long long x = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    throw ConfigError("config: " + key + " is not an unsigned integer: '" + v + "'");
  return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "on" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "off" || t == "0" || t == "no") return false;
  throw ConfigError("config: " + key + " is not a boolean: '" + v + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  return out;
}

template <class T, class Fn>
std::array<T, 3> to_triple(const std::string& key, const std::string& v, Fn&& conv) {
  const auto parts = split(v, ',');
  if (parts.size() != 3)
    throw ConfigError("config: " + key + " needs three comma-separated values");
  return {T(conv(key, parts[0])), T(conv(key, parts[1])), T(conv(key, parts[2]))};
}

}  // namespace config_detail

// "auto" or an explicit number
struct AutoOrValue {
  bool is_auto = true;
  double value = 0.0;

  static AutoOrValue parse(const std::string& key, const std::string& v) {
    if (config_detail::trim(v) == "auto") return {};
    return {false, config_detail::to_double(key, v)};
  }
  double resolve(double auto_value) const { return is_auto ? auto_value : value; }
};

struct RunConfig {
  std::string input;  // VLF base path; empty when the run generates its own volume
  std::string out = "out";
  std::uint64_t seed = 1;

  // [graph] knobs, named after the construction parameters
  std::vector<Axis> axes{Axis::PosX, Axis::PosY, Axis::PosZ};
  AutoOrValue u;  // bin width; auto = half the median neighbor spacing
  int A_max = 3;
  int R_side = 2;
  int K = 4;
  int deg_max = 6;
  bool reverse = true;
  bool cluster_off = false;
  AutoOrValue tau;  // auto = 2 * min voxel spacing
  bool between = true;
  double s_vox = 0.5;
  double r_vox = 1.5;
  double phi_min = 0.6;
  AxialMetric axial_metric = AxialMetric::Continuous;

  // [cells]
  AutoOrValue tau_cell;  // auto = 3 * min voxel spacing
  int min_nodes = 6;

  // [stats]
  int grid_1d = 256;
  int grid_2d = 128;
  bool log_volume = true;
  AutoOrValue bandwidth;  // 1D override; auto = Silverman

  EllipsoidLatticeConfig ellipsoid;
  GraphLatticeConfig graphlattice;
};

inline void validate(const RunConfig& c) {
  if (c.axes.empty()) throw ConfigError("config: graph axis list is empty");
  if (!c.u.is_auto && !(c.u.value > 0.0)) throw ConfigError("config: u must be > 0 or auto");
  if (c.A_max < 1) throw ConfigError("config: A_max must be >= 1");
  if (c.R_side < 0) throw ConfigError("config: R_side must be >= 0");
  if (c.K < 1) throw ConfigError("config: K must be >= 1");
  if (c.deg_max < 1) throw ConfigError("config: deg_max must be >= 1");
  if (!c.cluster_off && !c.tau.is_auto && !(c.tau.value > 0.0))
    throw ConfigError("config: tau must be > 0, auto, or off");
  if (!(c.s_vox > 0.0)) throw ConfigError("config: s_vox must be > 0");
  if (!(c.r_vox > 0.0)) throw ConfigError("config: r_vox must be > 0");
  if (c.phi_min < 0.0 || c.phi_min > 1.0) throw ConfigError("config: phi_min must be in [0,1]");
  if (!c.tau_cell.is_auto && !(c.tau_cell.value > 0.0))
    throw ConfigError("config: tau_cell must be > 0 or auto");
  if (c.min_nodes < 4) throw ConfigError("config: min_nodes must be >= 4");
  if (c.grid_1d < 2 || c.grid_2d < 2) throw ConfigError("config: grid sizes must be >= 2");
  if (!c.bandwidth.is_auto && !(c.bandwidth.value > 0.0))
    throw ConfigError("config: bandwidth must be > 0 or auto");
  try {
    validate(c.ellipsoid);
    validate(c.graphlattice);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline std::vector<Axis> parse_axis_list(const std::string& v) {
  std::vector<Axis> out;
  for (const auto& part : config_detail::split(v, ',')) {
    try {
      out.push_back(parse_axis(part));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  return out;
}

inline RunConfig parse_run_config(const std::string& text) {
  using namespace config_detail;
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;

  auto fail = [&](const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line_no) + ": " + msg);
  };

  std::map<std::string, std::string> seen;  // "section.key" -> value
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    // inline comment: '#' or ';' preceded by whitespace
    for (std::size_t i = 1; i < t.size(); ++i)
      if ((t[i] == '#' || t[i] == ';') && (t[i - 1] == ' ' || t[i - 1] == '\t')) {
        t = trim(t.substr(0, i));
        break;
      }
    if (t.front() == '[') {
      if (t.back() != ']') fail("malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) fail("empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (section.empty()) fail("key outside any [section]");
    const std::string full = section + "." + key;
    if (!seen.emplace(full, val).second) fail("duplicate key " + full);

    if (full == "io.input") cfg.input = val;
    else if (full == "io.out") cfg.out = val;
    else if (full == "run.seed") cfg.seed = to_u64(full, val);
    else if (full == "graph.axis") cfg.axes = parse_axis_list(val);
    else if (full == "graph.u") cfg.u = AutoOrValue::parse(full, val);
    else if (full == "graph.A_max") cfg.A_max = int(to_int(full, val));
    else if (full == "graph.R_side") cfg.R_side = int(to_int(full, val));
    else if (full == "graph.K") cfg.K = int(to_int(full, val));
    else if (full == "graph.deg_max") cfg.deg_max = int(to_int(full, val));
    else if (full == "graph.reverse") cfg.reverse = to_bool(full, val);
    else if (full == "graph.tau") {
      if (trim(val) == "off") cfg.cluster_off = true;
      else cfg.tau = AutoOrValue::parse(full, val);
    } else if (full == "graph.between") cfg.between = to_bool(full, val);
    else if (full == "graph.s_vox") cfg.s_vox = to_double(full, val);
    else if (full == "graph.r_vox") cfg.r_vox = to_double(full, val);
    else if (full == "graph.phi_min") cfg.phi_min = to_double(full, val);
    else if (full == "graph.axial_metric") {
      if (val == "continuous") cfg.axial_metric = AxialMetric::Continuous;
      else if (val == "bins") cfg.axial_metric = AxialMetric::BinUnits;
      else fail("axial_metric must be continuous or bins");
    } else if (full == "cells.tau_cell") cfg.tau_cell = AutoOrValue::parse(full, val);
    else if (full == "cells.min_nodes") cfg.min_nodes = int(to_int(full, val));
    else if (full == "stats.grid_1d") cfg.grid_1d = int(to_int(full, val));
    else if (full == "stats.grid_2d") cfg.grid_2d = int(to_int(full, val));
    else if (full == "stats.log_volume") cfg.log_volume = to_bool(full, val);
    else if (full == "stats.bandwidth") cfg.bandwidth = AutoOrValue::parse(full, val);
    else if (full == "ellipsoid.nx") cfg.ellipsoid.n_x = int(to_int(full, val));
    else if (full == "ellipsoid.layout")
      cfg.ellipsoid.layout = to_triple<int>(full, val, to_int);
    else if (full == "ellipsoid.semi_axes")
      cfg.ellipsoid.semi_axes = to_triple<double>(full, val, to_double);
    else if (full == "graphlattice.cells")
      cfg.graphlattice.cells = to_triple<int>(full, val, to_int);
    else if (full == "graphlattice.jitter") cfg.graphlattice.jitter = to_double(full, val);
    else if (full == "graphlattice.trail_radius")
      cfg.graphlattice.trail_radius = to_double(full, val);
    else if (full == "graphlattice.blob_radius")
      cfg.graphlattice.blob_radius = to_double(full, val);
    else if (full == "graphlattice.voxels_per_cell")
      cfg.graphlattice.voxels_per_cell = int(to_int(full, val));
    else fail("unknown key " + full);
  }
  cfg.graphlattice.seed = cfg.seed;
  validate(cfg);
  return cfg;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_text_file(path));
}

// --- resolution of auto values against a loaded volume -----------------------

inline double min_spacing(const GridSpec& spec) {
  return std::min({spec.spacing[0], spec.spacing[1], spec.spacing[2]});
}

inline GraphParams resolve_graph_params(const RunConfig& cfg, const CentroidTable& C,
                                        const GridSpec& spec) {
  GraphParams p;
  const double u = cfg.u.resolve(auto_bin_width(C));
  p.bin_grids = {u, u, u};
  p.A_max = cfg.A_max;
  p.R_side = cfg.R_side;
  p.K = cfg.K;
  p.deg_max = cfg.deg_max;
  p.reverse_pass = cfg.reverse;
  p.axial_metric = cfg.axial_metric;
  if (!cfg.cluster_off) p.cluster_tau = cfg.tau.resolve(2.0 * min_spacing(spec));
  if (cfg.between) p.between = BetweenGateParams{cfg.s_vox, cfg.r_vox, cfg.phi_min};
  return p;
}

inline double resolve_tau_cell(const RunConfig& cfg, const GridSpec& spec) {
  return cfg.tau_cell.resolve(3.0 * min_spacing(spec));
}

}  // namespace detlat

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "detlat/cells.hpp"
#include "detlat/centroids.hpp"
#include "detlat/config.hpp"
#include "detlat/csv.hpp"
#include "detlat/lattice_graph.hpp"
#include "detlat/stats.hpp"
#include "detlat/synthgen.hpp"
#include "detlat/trimesh.hpp"
#include "detlat/vlf.hpp"

namespace detlat {

inline constexpr const char* kVersion = "0.1.0";

struct PipelineError : std::runtime_error {
  std::string stage;
  PipelineError(const std::string& st, const std::string& msg)
      : std::runtime_error("stage " + st + ": " + msg), stage(st) {}
};

namespace pipeline_detail {

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string iso_utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", (unsigned long long)v);
  return buf;
}

// files written by the current run, removed together if a stage fails
class ArtifactSet {
 public:
  explicit ArtifactSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path claim(const std::string& rel) {
    names_.push_back(rel);
    const auto p = dir_ / rel;
    std::filesystem::create_directories(p.parent_path());
    return p;
  }
  void purge() noexcept {
    for (const auto& n : names_) {
      std::error_code ec;
      std::filesystem::remove(dir_ / n, ec);
    }
  }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> names_;
};

}  // namespace pipeline_detail

// Canonical INI text of the effective configuration; the manifest embeds this
// so a run can be reproduced without the original file.
inline std::string dump_config(const RunConfig& c) {
  std::ostringstream o;
  auto num = [](double v) { return format_g17(v); };
  auto auto_or = [&](const AutoOrValue& a) { return a.is_auto ? std::string("auto") : num(a.value); };
  o << "[io]\ninput = " << c.input << "\nout = " << c.out << "\n\n";
  o << "[run]\nseed = " << c.seed << "\n\n";
  o << "[graph]\naxis = ";
  for (std::size_t i = 0; i < c.axes.size(); ++i) o << (i ? "," : "") << axis_name(c.axes[i]);
  o << "\nu = " << auto_or(c.u) << "\nA_max = " << c.A_max << "\nR_side = " << c.R_side
    << "\nK = " << c.K << "\ndeg_max = " << c.deg_max
    << "\nreverse = " << (c.reverse ? "true" : "false")
    << "\ntau = " << (c.cluster_off ? std::string("off") : auto_or(c.tau))
    << "\nbetween = " << (c.between ? "true" : "false") << "\ns_vox = " << num(c.s_vox)
    << "\nr_vox = " << num(c.r_vox) << "\nphi_min = " << num(c.phi_min) << "\naxial_metric = "
    << (c.axial_metric == AxialMetric::Continuous ? "continuous" : "bins") << "\n\n";
  o << "[cells]\ntau_cell = " << auto_or(c.tau_cell) << "\nmin_nodes = " << c.min_nodes
    << "\n\n";
  o << "[stats]\ngrid_1d = " << c.grid_1d << "\ngrid_2d = " << c.grid_2d
    << "\nlog_volume = " << (c.log_volume ? "true" : "false")
    << "\nbandwidth = " << auto_or(c.bandwidth) << "\n\n";
  o << "[ellipsoid]\nnx = " << c.ellipsoid.n_x << "\nlayout = " << c.ellipsoid.layout[0] << ","
    << c.ellipsoid.layout[1] << "," << c.ellipsoid.layout[2] << "\nsemi_axes = "
    << num(c.ellipsoid.semi_axes[0]) << "," << num(c.ellipsoid.semi_axes[1]) << ","
    << num(c.ellipsoid.semi_axes[2]) << "\n\n";
  o << "[graphlattice]\ncells = " << c.graphlattice.cells[0] << "," << c.graphlattice.cells[1]
    << "," << c.graphlattice.cells[2] << "\njitter = " << num(c.graphlattice.jitter)
    << "\ntrail_radius = " << num(c.graphlattice.trail_radius)
    << "\nblob_radius = " << num(c.graphlattice.blob_radius)
    << "\nvoxels_per_cell = " << c.graphlattice.voxels_per_cell << "\n";
  return o.str();
}

inline void write_manifest(pipeline_detail::ArtifactSet& art, const std::string& command,
                           const RunConfig& cfg) {
  const std::string config_text = dump_config(cfg);
  nlohmann::json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["timestamp"] = pipeline_detail::iso_utc_now();
  j["seed"] = cfg.seed;
  j["config_fnv1a"] = pipeline_detail::hex64(pipeline_detail::fnv1a64(config_text));
  j["config"] = config_text;
  std::vector<std::string> outs = art.names();
  std::sort(outs.begin(), outs.end());
  j["outputs"] = outs;
  std::ofstream out(art.claim("manifest.json"));
  out << j.dump(2) << "\n";
}

enum class Stage { Centroids, Graph, Cells, Stats };

struct PipelineResult {
  CentroidTable centroids;
  LatticeGraph graph;
  CellExtraction cells;
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;
};

inline PipelineResult run_pipeline(const RunConfig& cfg, Stage through = Stage::Stats,
                                   bool quiet = false) {
  namespace fs = std::filesystem;
  if (cfg.input.empty()) throw ConfigError("config: io.input is required for this command");
  if (!fs::exists(cfg.input + ".json") || !fs::exists(cfg.input + ".bin"))
    throw IoError("input not found: " + cfg.input + "{.json,.bin}");
  fs::create_directories(cfg.out);

  pipeline_detail::ArtifactSet art(cfg.out);
  PipelineResult res;
  auto info = [&](const std::string& m) {
    if (!quiet) std::cout << m << "\n";
  };
  auto warn = [&](const std::string& m) {
    res.warnings.push_back(m);
    std::cerr << "warning: " << m << "\n";
  };
  auto guard = [&](const char* stage, auto&& fn) {
    try {
      fn();
    } catch (const IoError&) {
      art.purge();
      throw;
    } catch (const std::exception& e) {
      art.purge();
      throw PipelineError(stage, e.what());
    }
  };

  LabeledVolume vol;
  guard("load", [&] { vol = load_labeled_volume(cfg.input); });

  guard("centroids", [&] {
    res.centroids = centroid_table(vol);
    CsvWriter w(art.claim("centroids.csv").string());
    w.row({"label", "x", "y", "z"});
    for (std::size_t r = 0; r < res.centroids.size(); ++r)
      w.row({std::to_string(res.centroids.labels[r]), format_g17(res.centroids.points[r].x),
             format_g17(res.centroids.points[r].y), format_g17(res.centroids.points[r].z)});
    info("centroids: " + std::to_string(res.centroids.size()) + " instances");
  });
  if (through == Stage::Centroids) {
    guard("manifest", [&] { write_manifest(art, "centroids", cfg); });
    res.outputs = art.names();
    return res;
  }

  guard("graph", [&] {
    const GraphParams p = resolve_graph_params(cfg, res.centroids, vol.spec);
    res.graph = build_graph_axes(res.centroids, vol, p, cfg.axes);
    CsvWriter w(art.claim("edges.csv").string());
    w.row({"i", "j", "length"});
    for (const auto& e : res.graph.edges)
      w.row({std::to_string(e.i), std::to_string(e.j), format_g17(e.length)});
    info("graph: " + std::to_string(res.graph.edges.size()) + " edges");
    if (res.graph.edges.empty()) warn("graph has 0 edges");
  });
  if (through == Stage::Graph) {
    guard("manifest", [&] { write_manifest(art, "graph", cfg); });
    res.outputs = art.names();
    return res;
  }

  guard("cells", [&] {
    try {
      res.cells = extract_cells(res.graph, vol, resolve_tau_cell(cfg, vol.spec), cfg.min_nodes);
    } catch (const NoCellsError& e) {
      warn(std::string("cells: ") + e.what());
    }
    CsvWriter w(art.claim("cells.csv").string());
    w.row({"cell_id", "n_nodes", "Lx", "Ly", "Lz", "V", "AR1", "AR2", "AR3", "node_ids"});
    for (const auto& c : res.cells.cells) {
      std::string ids;
      for (std::size_t n = 0; n < c.record.node_ids.size(); ++n)
        ids += (n ? ";" : "") + std::to_string(c.record.node_ids[n]);
      w.row({std::to_string(c.record.cell_id), std::to_string(c.record.node_ids.size()),
             format_g17(c.record.Lx), format_g17(c.record.Ly), format_g17(c.record.Lz),
             format_g17(c.record.V), format_g17(c.record.AR1), format_g17(c.record.AR2),
             format_g17(c.record.AR3), ids});
    }
    for (const auto& c : res.cells.cells) {
      std::ofstream m(art.claim("meshes/cell_" + std::to_string(c.record.cell_id) + ".obj"));
      write_mesh_ascii(m, c.mesh);
    }
    info("cells: " + std::to_string(res.cells.cells.size()) + " (" +
         std::to_string(res.cells.degenerate_voids) + " degenerate voids)");
  });
  if (through == Stage::Cells) {
    guard("manifest", [&] { write_manifest(art, "cells", cfg); });
    res.outputs = art.names();
    return res;
  }

  guard("stats", [&] {
    std::vector<double> lx, ly, lz, v, ar1, ar2, ar3;
    for (const auto& c : res.cells.cells) {
      lx.push_back(c.record.Lx);
      ly.push_back(c.record.Ly);
      lz.push_back(c.record.Lz);
      v.push_back(c.record.V);
      ar1.push_back(c.record.AR1);
      ar2.push_back(c.record.AR2);
      ar3.push_back(c.record.AR3);
    }
    nlohmann::json j = nlohmann::json::object();
    if (lx.empty()) {
      warn("stats: no cell features to summarize");
    } else {
      const std::pair<const char*, const std::vector<double>*> feats[] = {
          {"lx", &lx}, {"ly", &ly}, {"lz", &lz}, {"v", &v},
          {"ar1", &ar1}, {"ar2", &ar2}, {"ar3", &ar3}};
      for (const auto& [name, samples] : feats) {
        const SummaryStats s = summary(*samples);
        j[name] = {{"mu", s.mu},     {"sigma", s.sigma}, {"median", s.median}, {"cv", s.cv},
                   {"p5", s.p5},     {"p95", s.p95},     {"n", s.n}};
      }
      const std::optional<double> bw =
          cfg.bandwidth.is_auto ? std::nullopt : std::optional<double>(cfg.bandwidth.value);
      const std::pair<const char*, const std::vector<double>*> curves[] = {
          {"lx", &lx}, {"ly", &ly}, {"lz", &lz}, {"v", &v}};
      for (const auto& [name, samples] : curves) {
        const DensityCurve1D c = kde_1d(*samples, cfg.grid_1d, bw);
        CsvWriter w(art.claim("kde1d_" + std::string(name) + ".csv").string());
        w.row({"x", "density"});
        for (std::size_t i = 0; i < c.grid.size(); ++i)
          w.row({format_g17(c.grid[i]), format_g17(c.density[i])});
      }
      const std::pair<const char*, const std::vector<double>*> ars[] = {
          {"ar1", &ar1}, {"ar2", &ar2}, {"ar3", &ar3}};
      for (const auto& [name, samples] : ars) {
        const DensityGrid2D g =
            kde_2d(v, *samples, cfg.grid_2d, std::nullopt, cfg.log_volume);
        CsvWriter w(art.claim("kde2d_v_" + std::string(name) + ".csv").string());
        w.row({"x", "y", "density"});
        for (std::size_t jj = 0; jj < g.y_grid.size(); ++jj)
          for (std::size_t ii = 0; ii < g.x_grid.size(); ++ii)
            w.row({format_g17(g.x_grid[ii]), format_g17(g.y_grid[jj]),
                   format_g17(g.density[jj * g.x_grid.size() + ii])});
      }
    }
    std::ofstream out(art.claim("stats.json"));
    out << j.dump(2) << "\n";
    info("stats: " + std::to_string(lx.size()) + " cell samples");
  });

  guard("manifest", [&] { write_manifest(art, "pipeline", cfg); });
  res.outputs = art.names();
  return res;
}

// --- generate ---------------------------------------------------------------

struct GenerateResult {
  int labels = 0;
  std::vector<std::string> outputs;
};

inline GenerateResult run_generate(const RunConfig& cfg_in, const std::string& preset,
                                   bool quiet = false) {
  namespace fs = std::filesystem;
  RunConfig cfg = cfg_in;
  cfg.graphlattice.seed = cfg.seed;  // [run] seed is authoritative, keeps the manifest replayable
  fs::create_directories(cfg.out);
  pipeline_detail::ArtifactSet art(cfg.out);
  GenerateResult res;
  auto guard = [&](const char* stage, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      art.purge();
      throw PipelineError(stage, e.what());
    }
  };

  if (preset == "ellipsoid") {
    EllipsoidLattice lat;
    guard("generate", [&] {
      lat = generate_ellipsoid_lattice(cfg.ellipsoid);
      art.claim("volume.json");
      art.claim("volume.bin");
      save_volume((fs::path(cfg.out) / "volume").string(), lat.volume);
      CsvWriter w(art.claim("truth_objects.csv").string());
      w.row({"id", "cx", "cy", "cz", "V_true"});
      for (const auto& t : lat.truth)
        w.row({std::to_string(t.id), format_g17(t.center.x), format_g17(t.center.y),
               format_g17(t.center.z), format_g17(t.volume)});
    });
    std::set<std::uint32_t> ids;
    for (std::uint32_t l : lat.volume.labels)
      if (l) ids.insert(l);
    res.labels = int(ids.size());
  } else if (preset == "graphlattice") {
    GraphLattice lat;
    guard("generate", [&] {
      lat = generate_graph_lattice(cfg.graphlattice);
      art.claim("volume.json");
      art.claim("volume.bin");
      save_volume((fs::path(cfg.out) / "volume").string(), lat.volume);
      CsvWriter wn(art.claim("truth_nodes.csv").string());
      wn.row({"id", "cx", "cy", "cz"});
      for (std::size_t i = 0; i < lat.truth.vertices.size(); ++i)
        wn.row({std::to_string(i), format_g17(lat.truth.vertices[i].x),
                format_g17(lat.truth.vertices[i].y), format_g17(lat.truth.vertices[i].z)});
      CsvWriter we(art.claim("truth_edges.csv").string());
      we.row({"i", "j"});
      for (const auto& e : lat.truth.edges)
        we.row({std::to_string(e[0]), std::to_string(e[1])});
    });
    res.labels = int(lat.truth.vertices.size());
  } else {
    throw ConfigError("unknown preset: " + preset + " (ellipsoid or graphlattice)");
  }

  guard("manifest", [&] { write_manifest(art, "generate " + preset, cfg); });
  if (!quiet)
    std::cout << "generate " << preset << ": " << res.labels << " instances -> " << cfg.out
              << "\n";
  res.outputs = art.names();
  return res;
}

// --- resolution sweep -------------------------------------------------------

struct SweepRow {
  int nx = 0;
  double mean_pct = 0;
  double std_pct = 0;
  std::uint64_t payload_bytes = 0;
  int instances = 0;
};

inline std::vector<SweepRow> run_sweep(const RunConfig& cfg, const std::vector<int>& nx_list,
                                       bool quiet = false) {
  namespace fs = std::filesystem;
  if (nx_list.empty()) throw ConfigError("sweep: empty resolution list");
  fs::create_directories(cfg.out);
  pipeline_detail::ArtifactSet art(cfg.out);
  std::vector<SweepRow> rows;

  try {
    for (int nx : nx_list) {
      EllipsoidLatticeConfig ecfg = cfg.ellipsoid;
      ecfg.n_x = nx;
      const EllipsoidLattice lat = generate_ellipsoid_lattice(ecfg);

      // voxel-count volumes and mean centers per label, one streaming pass
      const std::size_t n_truth = lat.truth.size();
      std::vector<std::uint64_t> count(n_truth + 1, 0);
      std::vector<Vec3> sum(n_truth + 1, Vec3{0, 0, 0});
      const auto& spec = lat.volume.spec;
      for (int k = 0; k < spec.dims[2]; ++k)
        for (int j = 0; j < spec.dims[1]; ++j)
          for (int i = 0; i < spec.dims[0]; ++i) {
            const std::uint32_t l = lat.volume.labels[spec.index(i, j, k)];
            if (l == 0) continue;
            ++count[l];
            sum[l] = sum[l] + spec.voxel_center(i, j, k);
          }
      const double voxel = spec.spacing[0] * spec.spacing[1] * spec.spacing[2];
      std::vector<double> pred_vol;
      std::vector<Vec3> pred_center;
      for (std::size_t l = 1; l <= n_truth; ++l)
        if (count[l] > 0) {
          pred_vol.push_back(double(count[l]) * voxel);
          pred_center.push_back(sum[l] * (1.0 / double(count[l])));
        }

      std::vector<Vec3> truth_center;
      std::vector<double> truth_vol;
      for (const auto& t : lat.truth) {
        truth_center.push_back(t.center);
        truth_vol.push_back(t.volume);
      }
      const auto pick = match_objects(pred_center, truth_center);
      std::vector<double> aligned(pick.size());
      for (std::size_t t = 0; t < pick.size(); ++t)
        aligned[t] = pred_vol[std::size_t(pick[t])];
      const VolumeError err = volume_error(aligned, truth_vol);

      SweepRow row;
      row.nx = nx;
      row.mean_pct = err.mean_pct;
      row.std_pct = err.std_pct;
      row.payload_bytes = std::uint64_t(nx) * std::uint64_t(nx) * std::uint64_t(nx) * 4u;
      row.instances = int(pred_vol.size());
      rows.push_back(row);
    }

    CsvWriter w(art.claim("sweep.csv").string());
    w.row({"nx", "mean_error_pct", "std_error_pct", "payload_bytes", "instances"});
    for (const auto& r : rows)
      w.row({std::to_string(r.nx), format_g17(r.mean_pct), format_g17(r.std_pct),
             std::to_string(r.payload_bytes), std::to_string(r.instances)});
    write_manifest(art, "sweep", cfg);
  } catch (const std::exception& e) {
    art.purge();
    throw PipelineError("sweep", e.what());
  }

  if (!quiet) {
    std::printf("%6s  %18s  %16s  %14s  %9s\n", "nx", "mean err (%)", "std err (%)",
                "payload (B)", "instances");
    for (const auto& r : rows)
      std::printf("%6d  %18.4f  %16.4f  %14llu  %9d\n", r.nx, r.mean_pct, r.std_pct,
                  (unsigned long long)r.payload_bytes, r.instances);
  }
  return rows;
}

}  // namespace detlat

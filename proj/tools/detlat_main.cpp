#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "detlat/pipeline.hpp"

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& part : detlat::config_detail::split(s, ','))
    out.push_back(int(detlat::config_detail::to_int("nx-list", part)));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"detlat: detonation-cell lattice reconstruction and measurement"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool quiet = false;
  app.add_option("--config", config_path, "run configuration file (INI)");
  app.add_option("--seed", seed, "override [run] seed");
  app.add_option("--out", out_dir, "override [io] out directory");
  app.add_flag("--quiet", quiet, "suppress progress output");

  auto* gen = app.add_subcommand("generate", "synthesize a labeled volume + ground truth");
  std::string preset;
  std::optional<int> nx;
  std::optional<std::string> cells_opt;
  std::optional<double> jitter;
  gen->add_option("--preset", preset, "ellipsoid | graphlattice")->required();
  gen->add_option("--nx", nx, "ellipsoid grid resolution override");
  gen->add_option("--cells", cells_opt, "graphlattice cells, e.g. 2,2,2");
  gen->add_option("--jitter", jitter, "graphlattice vertex jitter override");

  app.add_subcommand("centroids", "volume -> instance centroid table");
  app.add_subcommand("graph", "volume -> centroids -> lattice graph");
  app.add_subcommand("cells", "volume -> graph -> cell meshes and records");
  app.add_subcommand("stats", "volume -> cells -> summary statistics and KDEs");
  app.add_subcommand("pipeline", "run every stage and write all artifacts");

  auto* sw = app.add_subcommand("sweep", "ellipsoid resolution sweep error table");
  std::string nx_list = "60,120,240,480";
  sw->add_option("--nx-list", nx_list, "comma-separated resolutions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    detlat::RunConfig cfg =
        config_path.empty() ? detlat::RunConfig{} : detlat::load_run_config(config_path);
    if (seed) {
      cfg.seed = *seed;
      cfg.graphlattice.seed = *seed;
    }
    if (out_dir) cfg.out = *out_dir;
    if (nx) cfg.ellipsoid.n_x = *nx;
    if (cells_opt) {
      const auto v = parse_int_list(*cells_opt);
      if (v.size() != 3) throw detlat::ConfigError("--cells needs three values");
      cfg.graphlattice.cells = {v[0], v[1], v[2]};
    }
    if (jitter) cfg.graphlattice.jitter = *jitter;
    detlat::validate(cfg);

    if (app.got_subcommand("generate")) {
      detlat::run_generate(cfg, preset, quiet);
    } else if (app.got_subcommand("centroids")) {
      detlat::run_pipeline(cfg, detlat::Stage::Centroids, quiet);
    } else if (app.got_subcommand("graph")) {
      detlat::run_pipeline(cfg, detlat::Stage::Graph, quiet);
    } else if (app.got_subcommand("cells")) {
      detlat::run_pipeline(cfg, detlat::Stage::Cells, quiet);
    } else if (app.got_subcommand("stats") || app.got_subcommand("pipeline")) {
      detlat::run_pipeline(cfg, detlat::Stage::Stats, quiet);
    } else if (app.got_subcommand("sweep")) {
      detlat::run_sweep(cfg, parse_int_list(nx_list), quiet);
    }
    return 0;
  } catch (const detlat::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const detlat::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const detlat::PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

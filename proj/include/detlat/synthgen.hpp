#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "detlat/geometry.hpp"
#include "detlat/grid.hpp"
#include "detlat/rng.hpp"

namespace detlat {

// ---------------------------------------------------------------------------
// Ellipsoid benchmark lattice: cx*cy*cz disjoint ellipsoids on a regular grid
// filling the unit cube, sampled onto a cubic n_x^3 voxel grid. The continuous
// geometry never depends on n_x, so resolution is the only experimental knob.
// ---------------------------------------------------------------------------

struct EllipsoidLatticeConfig {
  int n_x = 240;
  std::array<int, 3> layout{5, 4, 3};         // object counts per axis
  std::array<double, 3> semi_axes{0.45, 0.40, 0.35};  // fractions of cell pitch
  int base_n = 240;  // reference resolution the geometry is quoted at
};

inline void validate(const EllipsoidLatticeConfig& cfg) {
  if (cfg.n_x < 8) throw std::invalid_argument("ellipsoid lattice: n_x must be >= 8");
  for (int c : cfg.layout)
    if (c < 1) throw std::invalid_argument("ellipsoid lattice: layout counts must be >= 1");
  for (double s : cfg.semi_axes)
    if (!(s > 0.0) || s > 0.5)
      throw std::invalid_argument(
          "ellipsoid lattice: semi-axes must lie in (0, 0.5] of the pitch "
          "(larger values overlap neighboring objects)");
}

struct ObjectTruth {
  std::uint32_t id = 0;
  Vec3 center{};
  double volume = 0.0;  // analytic, physical units
};

struct EllipsoidLattice {
  LabeledVolume volume;
  std::vector<ObjectTruth> truth;
};

inline EllipsoidLattice generate_ellipsoid_lattice(const EllipsoidLatticeConfig& cfg) {
  validate(cfg);
  const auto [cx, cy, cz] = cfg.layout;
  const double h = 1.0 / cfg.n_x;
  GridSpec spec;
  spec.dims = {cfg.n_x, cfg.n_x, cfg.n_x};
  spec.spacing = {h, h, h};
  spec.origin = {h / 2, h / 2, h / 2};

  const std::array<double, 3> pitch{1.0 / cx, 1.0 / cy, 1.0 / cz};
  const std::array<double, 3> semi{cfg.semi_axes[0] * pitch[0], cfg.semi_axes[1] * pitch[1],
                                   cfg.semi_axes[2] * pitch[2]};

  EllipsoidLattice out;
  out.volume = make_labeled(spec);
  for (int kz = 0; kz < cz; ++kz)
    for (int ky = 0; ky < cy; ++ky)
      for (int kx = 0; kx < cx; ++kx) {
        ObjectTruth t;
        t.id = std::uint32_t(1 + kx + cx * (ky + cy * kz));
        t.center = {(kx + 0.5) * pitch[0], (ky + 0.5) * pitch[1], (kz + 0.5) * pitch[2]};
        t.volume = 4.0 * std::acos(-1.0) / 3.0 * semi[0] * semi[1] * semi[2];
        out.truth.push_back(t);
      }
  std::sort(out.truth.begin(), out.truth.end(),
            [](const ObjectTruth& a, const ObjectTruth& b) { return a.id < b.id; });

  // each voxel can only belong to the ellipsoid of its own layout cell
  for (int k = 0; k < cfg.n_x; ++k)
    for (int j = 0; j < cfg.n_x; ++j)
      for (int i = 0; i < cfg.n_x; ++i) {
        const Vec3 p = spec.voxel_center(i, j, k);
        const int kx = std::min(cx - 1, int(p.x * cx));
        const int ky = std::min(cy - 1, int(p.y * cy));
        const int kz = std::min(cz - 1, int(p.z * cz));
        const double ex = (p.x - (kx + 0.5) * pitch[0]) / semi[0];
        const double ey = (p.y - (ky + 0.5) * pitch[1]) / semi[1];
        const double ez = (p.z - (kz + 0.5) * pitch[2]) / semi[2];
        if (ex * ex + ey * ey + ez * ez <= 1.0)
          out.volume.labels[spec.index(i, j, k)] =
              std::uint32_t(1 + kx + cx * (ky + cy * kz));
      }
  return out;
}

// ---------------------------------------------------------------------------
// Graph-truth lattice: vertex blobs + edge trails + cell-face walls on a unit
// pitch lattice, labeled by nearest vertex. A ghost shell one full pitch past
// the boundary vertices (straight, unjittered) both carries structure and
// competes in the nearest-vertex labeling; voxels a ghost wins stay
// background. Every real vertex is therefore clipped by midplanes on all
// sides exactly like an interior one, so at zero jitter all labels are exact
// translates of each other. A 2-voxel background gap separates the surviving
// structure from the domain boundary, the exterior drains to one discardable
// component, and the interior voids are exactly the cells.
// ---------------------------------------------------------------------------

struct GraphLatticeConfig {
  std::array<int, 3> cells{2, 2, 2};  // mx, my, mz
  double jitter = 0.0;                // max vertex displacement, fraction of pitch
  double trail_radius = 1.5;          // voxels; also the wall half-thickness
  double blob_radius = 3.0;           // voxels
  int voxels_per_cell = 16;
  std::uint64_t seed = 1;
};

inline void validate(const GraphLatticeConfig& cfg) {
  for (int m : cfg.cells)
    if (m < 1) throw std::invalid_argument("graph lattice: cells per axis must be >= 1");
  if (!(cfg.jitter >= 0.0) || cfg.jitter >= 0.3)
    throw std::invalid_argument("graph lattice: jitter must lie in [0, 0.3)");
  if (!(cfg.trail_radius >= 1.0) || !(cfg.blob_radius >= 1.0))
    throw std::invalid_argument("graph lattice: radii must be >= 1 voxel");
  if (cfg.voxels_per_cell < int(8 * cfg.trail_radius) ||
      cfg.voxels_per_cell < int(4 * cfg.blob_radius))
    throw std::invalid_argument(
        "graph lattice: voxels_per_cell too small for the configured radii");
}

struct GraphLatticeTruth {
  std::vector<Vec3> vertices;              // index = label - 1
  std::vector<std::array<int, 2>> edges;   // vertex index pairs, first < second
};

struct GraphLattice {
  LabeledVolume volume;
  GraphLatticeTruth truth;
};

namespace synth_detail {

struct Painter {
  const GridSpec& spec;
  std::vector<char>& mark;

  std::array<int, 2> span(double lo, double hi, int axis) const {
    int a = int(std::floor((lo - spec.origin[axis]) / spec.spacing[axis]));
    int b = int(std::ceil((hi - spec.origin[axis]) / spec.spacing[axis]));
    return {std::max(0, a), std::min(spec.dims[axis] - 1, b)};
  }

  template <class DistFn>
  void paint(const Vec3& lo, const Vec3& hi, double r, DistFn&& d) {
    const auto xr = span(lo.x - r, hi.x + r, 0);
    const auto yr = span(lo.y - r, hi.y + r, 1);
    const auto zr = span(lo.z - r, hi.z + r, 2);
    for (int k = zr[0]; k <= zr[1]; ++k)
      for (int j = yr[0]; j <= yr[1]; ++j)
        for (int i = xr[0]; i <= xr[1]; ++i) {
          const Vec3 c = spec.voxel_center(i, j, k);
          if (d(c) <= r) mark[spec.index(i, j, k)] = 1;
        }
  }

  void ball(const Vec3& c, double r) {
    paint(c, c, r, [&](const Vec3& p) { return dist(p, c); });
  }
  void capsule(const Vec3& a, const Vec3& b, double r) {
    Vec3 lo{std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
    Vec3 hi{std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
    paint(lo, hi, r, [&](const Vec3& p) { return dist_point_segment(p, a, b); });
  }
  void slab(const Vec3& a, const Vec3& b, const Vec3& c, double t) {
    Vec3 lo{std::min({a.x, b.x, c.x}), std::min({a.y, b.y, c.y}), std::min({a.z, b.z, c.z})};
    Vec3 hi{std::max({a.x, b.x, c.x}), std::max({a.y, b.y, c.y}), std::max({a.z, b.z, c.z})};
    paint(lo, hi, t, [&](const Vec3& p) { return dist_point_triangle(p, a, b, c); });
  }
};

}  // namespace synth_detail

inline GraphLattice generate_graph_lattice(const GraphLatticeConfig& cfg) {
  validate(cfg);
  const auto [mx, my, mz] = cfg.cells;
  const int vpc = cfg.voxels_per_cell;
  const double h = 1.0 / vpc;  // pitch is 1
  const int gap = 2;

  GridSpec spec;
  spec.dims = {(mx + 1) * vpc + 2 * gap, (my + 1) * vpc + 2 * gap, (mz + 1) * vpc + 2 * gap};
  spec.spacing = {h, h, h};
  spec.origin = {-0.5 - gap * h + h / 2, -0.5 - gap * h + h / 2, -0.5 - gap * h + h / 2};

  GraphLattice out;
  out.volume = make_labeled(spec);

  // jittered vertices, fixed draw order
  const int nvx = mx + 1, nvy = my + 1, nvz = mz + 1;
  SplitMix64 rng(cfg.seed);
  auto vid = [&](int ix, int iy, int iz) { return ix + nvx * (iy + nvy * iz); };
  out.truth.vertices.resize(std::size_t(nvx) * nvy * nvz);
  for (int iz = 0; iz < nvz; ++iz)
    for (int iy = 0; iy < nvy; ++iy)
      for (int ix = 0; ix < nvx; ++ix) {
        Vec3 v{double(ix), double(iy), double(iz)};
        if (cfg.jitter > 0.0) {
          v.x += rng.uniform(-cfg.jitter, cfg.jitter);
          v.y += rng.uniform(-cfg.jitter, cfg.jitter);
          v.z += rng.uniform(-cfg.jitter, cfg.jitter);
        }
        out.truth.vertices[std::size_t(vid(ix, iy, iz))] = v;
      }

  // ghost accessor: out-of-range indices sit one full pitch beyond their
  // clamped real vertex, keeping the real vertex's lateral jitter
  auto vpos = [&](int ix, int iy, int iz) {
    const int cxi = std::clamp(ix, 0, mx), cyi = std::clamp(iy, 0, my),
              czi = std::clamp(iz, 0, mz);
    Vec3 v = out.truth.vertices[std::size_t(vid(cxi, cyi, czi))];
    v.x += double(ix < 0 ? -1 : ix > mx ? 1 : 0);
    v.y += double(iy < 0 ? -1 : iy > my ? 1 : 0);
    v.z += double(iz < 0 ? -1 : iz > mz ? 1 : 0);
    return v;
  };

  std::vector<char> mark(out.volume.labels.size(), 0);
  synth_detail::Painter painter{spec, mark};
  const double r_trail = cfg.trail_radius * h;
  const double r_blob = cfg.blob_radius * h;

  for (int iz = 0; iz < nvz; ++iz)
    for (int iy = 0; iy < nvy; ++iy)
      for (int ix = 0; ix < nvx; ++ix) painter.ball(vpos(ix, iy, iz), r_blob);

  // trails along every lattice edge plus half-pitch stubs past the boundary
  for (int iz = 0; iz < nvz; ++iz)
    for (int iy = 0; iy < nvy; ++iy)
      for (int ix = -1; ix <= mx; ++ix)
        painter.capsule(vpos(ix, iy, iz), vpos(ix + 1, iy, iz), r_trail);
  for (int iz = 0; iz < nvz; ++iz)
    for (int ix = 0; ix < nvx; ++ix)
      for (int iy = -1; iy <= my; ++iy)
        painter.capsule(vpos(ix, iy, iz), vpos(ix, iy + 1, iz), r_trail);
  for (int iy = 0; iy < nvy; ++iy)
    for (int ix = 0; ix < nvx; ++ix)
      for (int iz = -1; iz <= mz; ++iz)
        painter.capsule(vpos(ix, iy, iz), vpos(ix, iy, iz + 1), r_trail);

  // walls: every lattice face, extended one half-cell into the margin
  auto wall_quad = [&](const Vec3& c00, const Vec3& c10, const Vec3& c01, const Vec3& c11) {
    painter.slab(c00, c10, c11, r_trail);
    painter.slab(c00, c11, c01, r_trail);
  };
  for (int iz = 0; iz < nvz; ++iz)  // xy faces in plane of each vertex layer
    for (int iy = -1; iy <= my; ++iy)
      for (int ix = -1; ix <= mx; ++ix)
        wall_quad(vpos(ix, iy, iz), vpos(ix + 1, iy, iz), vpos(ix, iy + 1, iz),
                  vpos(ix + 1, iy + 1, iz));
  for (int iy = 0; iy < nvy; ++iy)  // xz faces
    for (int iz = -1; iz <= mz; ++iz)
      for (int ix = -1; ix <= mx; ++ix)
        wall_quad(vpos(ix, iy, iz), vpos(ix + 1, iy, iz), vpos(ix, iy, iz + 1),
                  vpos(ix + 1, iy, iz + 1));
  for (int ix = 0; ix < nvx; ++ix)  // yz faces
    for (int iz = -1; iz <= mz; ++iz)
      for (int iy = -1; iy <= my; ++iy)
        wall_quad(vpos(ix, iy, iz), vpos(ix, iy + 1, iz), vpos(ix, iy, iz + 1),
                  vpos(ix, iy + 1, iz + 1));

  // label every structure voxel by its nearest vertex, ghosts included
  // (ties -> first in index order); a ghost win leaves the voxel background
  for (int k = 0; k < spec.dims[2]; ++k)
    for (int j = 0; j < spec.dims[1]; ++j)
      for (int i = 0; i < spec.dims[0]; ++i) {
        const std::size_t at = spec.index(i, j, k);
        if (!mark[at]) continue;
        const Vec3 p = spec.voxel_center(i, j, k);
        const int bx = int(std::floor(p.x)), by = int(std::floor(p.y)),
                  bz = int(std::floor(p.z));
        double best = 1e300;
        int best_id = -1;
        for (int iz = std::max(-1, bz - 1); iz <= std::min(mz + 1, bz + 2); ++iz)
          for (int iy = std::max(-1, by - 1); iy <= std::min(my + 1, by + 2); ++iy)
            for (int ix = std::max(-1, bx - 1); ix <= std::min(mx + 1, bx + 2); ++ix) {
              const double d = dist_sq(p, vpos(ix, iy, iz));
              const bool ghost = ix < 0 || iy < 0 || iz < 0 || ix > mx || iy > my || iz > mz;
              if (d < best) {
                best = d;
                best_id = ghost ? -1 : vid(ix, iy, iz);
              }
            }
        if (best_id >= 0) out.volume.labels[at] = std::uint32_t(best_id + 1);
      }

  // ground-truth edge list in vertex-id order
  for (int iz = 0; iz < nvz; ++iz)
    for (int iy = 0; iy < nvy; ++iy)
      for (int ix = 0; ix < nvx; ++ix) {
        const int a = vid(ix, iy, iz);
        if (ix + 1 < nvx) out.truth.edges.push_back({a, vid(ix + 1, iy, iz)});
        if (iy + 1 < nvy) out.truth.edges.push_back({a, vid(ix, iy + 1, iz)});
        if (iz + 1 < nvz) out.truth.edges.push_back({a, vid(ix, iy, iz + 1)});
      }
  std::sort(out.truth.edges.begin(), out.truth.edges.end());
  return out;
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

// Injective nearest-center correspondence: result[t] = index into predicted
// for truth object t.
inline std::vector<int> match_objects(const std::vector<Vec3>& predicted_centers,
                                      const std::vector<Vec3>& truth_centers) {
  if (predicted_centers.size() != truth_centers.size())
    throw std::invalid_argument("match_objects: object counts differ");
  std::vector<int> pick(truth_centers.size(), -1);
  std::vector<char> used(predicted_centers.size(), 0);
  for (std::size_t t = 0; t < truth_centers.size(); ++t) {
    double best = 1e300;
    int arg = -1;
    for (std::size_t p = 0; p < predicted_centers.size(); ++p) {
      const double d = dist_sq(predicted_centers[p], truth_centers[t]);
      if (d < best) {
        best = d;
        arg = int(p);
      }
    }
    if (arg < 0 || used[std::size_t(arg)])
      throw std::invalid_argument("match_objects: correspondence is not one-to-one");
    used[std::size_t(arg)] = 1;
    pick[t] = arg;
  }
  return pick;
}

struct VolumeError {
  double mean_pct = 0.0;
  double std_pct = 0.0;
};

// mean +/- sample std of 100*|V_pred - V_true|/V_true over aligned objects
inline VolumeError volume_error(const std::vector<double>& predicted,
                                const std::vector<double>& truth) {
  if (predicted.size() != truth.size() || truth.empty())
    throw std::invalid_argument("volume_error: unmatched objects");
  std::vector<double> err;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!(truth[i] > 0.0)) throw std::invalid_argument("volume_error: nonpositive truth");
    err.push_back(100.0 * std::abs(predicted[i] - truth[i]) / truth[i]);
  }
  VolumeError out;
  for (double e : err) out.mean_pct += e;
  out.mean_pct /= double(err.size());
  if (err.size() > 1) {
    double ss = 0.0;
    for (double e : err) ss += (e - out.mean_pct) * (e - out.mean_pct);
    out.std_pct = std::sqrt(ss / double(err.size() - 1));
  }
  return out;
}

}  // namespace detlat

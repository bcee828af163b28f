#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "detlat/components.hpp"
#include "detlat/convex_hull.hpp"
#include "detlat/grid.hpp"
#include "detlat/kdtree.hpp"
#include "detlat/lattice_graph.hpp"
#include "detlat/trimesh.hpp"

namespace detlat {

inline std::array<double, 3> aspect_ratios(double lx, double ly, double lz) {
  if (!(lx > 0.0) || !(ly > 0.0) || !(lz > 0.0))
    throw std::invalid_argument("aspect_ratios: extents must be > 0");
  return {lx / ly, lx / lz, ly / lz};
}

struct CellRecord {
  int cell_id = 0;
  double Lx = 0, Ly = 0, Lz = 0;
  double V = 0;
  double AR1 = 0, AR2 = 0, AR3 = 0;
  std::vector<int> node_ids;  // graph node indices forming the cell
};

struct Cell {
  std::vector<int> nodes;
  TriMesh mesh;
  CellRecord record;
};

struct CellExtraction {
  std::vector<Cell> cells;
  int degenerate_voids = 0;  // voids with enough nodes but a flat node set
};

struct NoCellsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace cells_detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(std::size_t(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[std::size_t(x)] != x) {
      parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
      x = parent[std::size_t(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[std::size_t(find(a))] = find(b); }
};

}  // namespace cells_detail

// Void-component cell extraction: each interior background component is a
// candidate cell interior; the cell surface is the convex hull of the graph
// nodes adjacent (within tau_cell) to that void.
inline CellExtraction extract_cells(const LatticeGraph& g, const LabeledVolume& v,
                                    double tau_cell, int min_nodes) {
  validate(v);
  if (!(tau_cell > 0.0)) throw std::invalid_argument("extract_cells: tau_cell must be > 0");
  if (min_nodes < 4) throw std::invalid_argument("extract_cells: min_nodes must be >= 4");
  const auto& spec = v.spec;
  const int n_nodes = int(g.nodes.size());

  // background mask -> 6-connected components
  LabeledVolume bg = make_labeled(spec);
  for (std::size_t i = 0; i < v.labels.size(); ++i) bg.labels[i] = v.labels[i] == 0 ? 1u : 0u;
  const LabeledVolume comps = connected_components(bg, 6);

  // interior voids: discard every component that reaches the domain boundary
  std::uint32_t max_comp = 0;
  for (std::uint32_t c : comps.labels) max_comp = std::max(max_comp, c);
  std::vector<char> touches(std::size_t(max_comp) + 1, 0);
  for (int k = 0; k < spec.dims[2]; ++k)
    for (int j = 0; j < spec.dims[1]; ++j)
      for (int i = 0; i < spec.dims[0]; ++i) {
        const bool boundary = i == 0 || j == 0 || k == 0 || i == spec.dims[0] - 1 ||
                              j == spec.dims[1] - 1 || k == spec.dims[2] - 1;
        if (!boundary) continue;
        const std::uint32_t c = comps.labels[spec.index(i, j, k)];
        if (c != 0) touches[c] = 1;
      }

  // void voxel centers grouped by component, scan order
  std::vector<std::vector<Vec3>> void_pts(std::size_t(max_comp) + 1);
  for (int k = 0; k < spec.dims[2]; ++k)
    for (int j = 0; j < spec.dims[1]; ++j)
      for (int i = 0; i < spec.dims[0]; ++i) {
        const std::uint32_t c = comps.labels[spec.index(i, j, k)];
        if (c != 0 && !touches[c]) void_pts[c].push_back(spec.voxel_center(i, j, k));
      }

  CellExtraction out;
  for (std::uint32_t c = 1; c <= max_comp; ++c) {  // component ids are discovery-ordered
    const auto& pts = void_pts[c];
    if (pts.empty()) continue;
    PointIndex idx(pts);
    std::vector<int> members;
    for (int nd = 0; nd < n_nodes; ++nd)
      if (idx.nearest_distance(g.nodes.points[std::size_t(nd)]) <= tau_cell)
        members.push_back(nd);
    if (int(members.size()) < min_nodes) continue;

    // induced subgraph must be connected
    cells_detail::UnionFind uf(int(members.size()));
    std::vector<int> slot(std::size_t(n_nodes), -1);
    for (std::size_t m = 0; m < members.size(); ++m) slot[std::size_t(members[m])] = int(m);
    for (const auto& e : g.edges)
      if (slot[std::size_t(e.i)] >= 0 && slot[std::size_t(e.j)] >= 0)
        uf.unite(slot[std::size_t(e.i)], slot[std::size_t(e.j)]);
    bool connected = true;
    for (std::size_t m = 1; m < members.size(); ++m)
      if (uf.find(int(m)) != uf.find(0)) {
        connected = false;
        break;
      }
    if (!connected) continue;

    std::vector<Vec3> node_pos;
    for (int nd : members) node_pos.push_back(g.nodes.points[std::size_t(nd)]);
    TriMesh mesh;
    try {
      mesh = convex_hull(node_pos);
    } catch (const DegenerateHullError&) {
      ++out.degenerate_voids;
      continue;
    }

    Cell cell;
    cell.nodes = members;
    cell.mesh = std::move(mesh);
    const auto ext = axis_extents(cell.mesh);
    const auto ar = aspect_ratios(ext[0], ext[1], ext[2]);
    cell.record.cell_id = int(out.cells.size()) + 1;
    cell.record.Lx = ext[0];
    cell.record.Ly = ext[1];
    cell.record.Lz = ext[2];
    cell.record.V = mesh_volume(cell.mesh);
    cell.record.AR1 = ar[0];
    cell.record.AR2 = ar[1];
    cell.record.AR3 = ar[2];
    cell.record.node_ids = members;
    out.cells.push_back(std::move(cell));
  }

  if (out.cells.empty())
    throw NoCellsError("extract_cells: no qualifying voids (" +
                       std::to_string(out.degenerate_voids) + " degenerate)");
  return out;
}

}  // namespace detlat

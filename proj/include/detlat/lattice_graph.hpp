#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "detlat/centroids.hpp"
#include "detlat/geometry.hpp"
#include "detlat/grid.hpp"
#include "detlat/kdtree.hpp"

namespace detlat {

enum class Axis { PosX, NegX, PosY, NegY, PosZ, NegZ };

inline std::string axis_name(Axis a) {
  switch (a) {
    case Axis::PosX: return "+X";
    case Axis::NegX: return "-X";
    case Axis::PosY: return "+Y";
    case Axis::NegY: return "-Y";
    case Axis::PosZ: return "+Z";
    default: return "-Z";
  }
}

inline Axis parse_axis(const std::string& s) {
  if (s == "+X" || s == "+x") return Axis::PosX;
  if (s == "-X" || s == "-x") return Axis::NegX;
  if (s == "+Y" || s == "+y") return Axis::PosY;
  if (s == "-Y" || s == "-y") return Axis::NegY;
  if (s == "+Z" || s == "+z") return Axis::PosZ;
  if (s == "-Z" || s == "-z") return Axis::NegZ;
  throw std::invalid_argument("axis must be one of +X,-X,+Y,-Y,+Z,-Z (got '" + s + "')");
}

// axis -> (axial component, lateral components, sign); the lateral pair keeps
// the natural (x,y,z) order of the two remaining axes.
struct AxisMap {
  int ax;      // 0,1,2 component carrying A
  int lat1;    // first lateral component
  int lat2;    // second lateral component
  int sgn;     // +1 or -1
};

inline AxisMap axis_map(Axis a) {
  switch (a) {
    case Axis::PosX: return {0, 1, 2, +1};
    case Axis::NegX: return {0, 1, 2, -1};
    case Axis::PosY: return {1, 0, 2, +1};
    case Axis::NegY: return {1, 0, 2, -1};
    case Axis::PosZ: return {2, 0, 1, +1};
    default: return {2, 0, 1, -1};
  }
}

enum class AxialMetric { BinUnits, Continuous };

struct BetweenGateParams {
  double s_vox = 0.5;
  double r_vox = 1.5;
  double phi_min = 0.6;
};

struct GraphParams {
  Axis axis = Axis::PosX;
  std::array<double, 3> bin_grids{1.0, 1.0, 1.0};  // u_x, u_y, u_z
  int A_max = 3;
  int R_side = 2;
  int K = 4;  // beam width
  int deg_max = 6;
  bool reverse_pass = true;
  std::optional<double> cluster_tau;           // Cluster gate threshold
  std::optional<BetweenGateParams> between;    // Between (occupancy) gate
  AxialMetric axial_metric = AxialMetric::Continuous;
};

inline void validate(const GraphParams& p) {
  for (double u : p.bin_grids)
    if (!(u > 0.0)) throw std::invalid_argument("GraphParams: bin grids must be > 0");
  if (p.A_max < 1) throw std::invalid_argument("GraphParams: A_max must be >= 1");
  if (p.R_side < 0) throw std::invalid_argument("GraphParams: R_side must be >= 0");
  if (p.K < 1) throw std::invalid_argument("GraphParams: K must be >= 1");
  if (p.deg_max < 1) throw std::invalid_argument("GraphParams: deg_max must be >= 1");
  if (p.cluster_tau && !(*p.cluster_tau > 0.0))
    throw std::invalid_argument("GraphParams: tau must be > 0");
  if (p.between) {
    if (!(p.between->s_vox > 0.0)) throw std::invalid_argument("GraphParams: s_vox must be > 0");
    if (!(p.between->r_vox > 0.0)) throw std::invalid_argument("GraphParams: r_vox must be > 0");
    if (p.between->phi_min < 0.0 || p.between->phi_min > 1.0)
      throw std::invalid_argument("GraphParams: phi_min must be in [0,1]");
  }
}

// Per-node integer bin coordinates plus the axis-induced (A,U,V) view.
// K_bin is the z bin array; the beam width K lives in GraphParams.
struct BinCoords {
  std::vector<int> I, J, K_bin;
  std::vector<int> A, U, V;
  int sgn = +1;
};

inline BinCoords bin_coords(const CentroidTable& C, std::array<double, 3> grids, Axis axis) {
  for (double u : grids)
    if (!(u > 0.0)) throw std::invalid_argument("bin_coords: grids must be > 0");
  const std::size_t n = C.size();
  Vec3 mn = C.points.empty() ? Vec3{0, 0, 0} : C.points[0];
  for (const auto& p : C.points)
    for (int a = 0; a < 3; ++a) mn[a] = std::min(mn[a], p[a]);
  BinCoords b;
  b.I.resize(n);
  b.J.resize(n);
  b.K_bin.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    b.I[r] = int(std::floor((C.points[r].x - mn.x) / grids[0]));
    b.J[r] = int(std::floor((C.points[r].y - mn.y) / grids[1]));
    b.K_bin[r] = int(std::floor((C.points[r].z - mn.z) / grids[2]));
  }
  const AxisMap m = axis_map(axis);
  b.sgn = m.sgn;
  const std::vector<int>* by_comp[3] = {&b.I, &b.J, &b.K_bin};
  b.A = *by_comp[m.ax];
  b.U = *by_comp[m.lat1];
  b.V = *by_comp[m.lat2];
  return b;
}

struct Edge {
  int i = 0;  // i < j
  int j = 0;
  double length = 0.0;
};

inline bool operator==(const Edge& a, const Edge& b) {
  return a.i == b.i && a.j == b.j && a.length == b.length;
}

struct LatticeGraph {
  CentroidTable nodes;
  std::vector<Edge> edges;
  std::vector<int> deg;
};

using LabelIndexMap = std::map<std::uint32_t, PointIndex>;

inline std::vector<Vec3> labeled_voxel_centers(const LabeledVolume& v) {
  validate(v);
  std::vector<Vec3> out;
  std::size_t idx = 0;
  for (int k = 0; k < v.spec.dims[2]; ++k)
    for (int j = 0; j < v.spec.dims[1]; ++j)
      for (int i = 0; i < v.spec.dims[0]; ++i, ++idx)
        if (v.labels[idx] != 0) out.push_back(v.spec.voxel_center(i, j, k));
  return out;
}

inline LabelIndexMap build_label_indices(const LabeledVolume& v) {
  validate(v);
  std::map<std::uint32_t, std::vector<Vec3>> pts;
  std::size_t idx = 0;
  for (int k = 0; k < v.spec.dims[2]; ++k)
    for (int j = 0; j < v.spec.dims[1]; ++j)
      for (int i = 0; i < v.spec.dims[0]; ++i, ++idx)
        if (v.labels[idx] != 0) pts[v.labels[idx]].push_back(v.spec.voxel_center(i, j, k));
  LabelIndexMap out;
  for (auto& [label, centers] : pts) out.emplace(label, PointIndex(std::move(centers)));
  return out;
}

// Fraction of evenly spaced samples on [p,q] (endpoints included) that lie
// within r of the indexed point set.
inline double hit_fraction(const Vec3& p, const Vec3& q, const PointIndex& idx, double s,
                           double r) {
  if (!(s > 0.0) || !(r > 0.0)) throw std::invalid_argument("hit_fraction: s and r must be > 0");
  if (p == q) throw std::invalid_argument("hit_fraction: p and q must differ");
  const double len = dist(p, q);
  const int m = std::max(2, int(std::ceil(len / s)) + 1);
  int hits = 0;
  for (int t = 0; t < m; ++t) {
    const double u = double(t) / double(m - 1);
    const Vec3 x = p + (q - p) * u;
    if (idx.nearest_distance(x) <= r) ++hits;
  }
  return double(hits) / double(m);
}

// Accept iff either endpoint centroid lies within tau of the other endpoint's
// labeled voxels.
inline bool cluster_gate(int i, int j, const LabelIndexMap& per_label, const CentroidTable& C,
                         double tau) {
  const auto it_j = per_label.find(C.labels[std::size_t(j)]);
  const auto it_i = per_label.find(C.labels[std::size_t(i)]);
  if (it_j == per_label.end() || it_i == per_label.end())
    throw std::invalid_argument("cluster_gate: missing label index");
  const double dij = it_j->second.nearest_distance(C.points[std::size_t(i)]);
  const double dji = it_i->second.nearest_distance(C.points[std::size_t(j)]);
  return std::min(dij, dji) <= tau;
}

namespace graph_detail {

struct GateContext {
  const LabelIndexMap* per_label = nullptr;
  const PointIndex* union_index = nullptr;
  double tau = 0.0;
  double s = 0.0;
  double r = 0.0;
  double phi_min = 0.0;
  bool cluster_on = false;
  bool between_on = false;
};

// One full forward(+reverse) application of the construction for a single
// axis, sharing degree counters, the dedup set, and the edge list with any
// previous applications.
inline void run_axis_passes(const CentroidTable& C, const GraphParams& p,
                            const GateContext& gates, std::vector<int>& deg,
                            std::set<std::pair<int, int>>& dedup, std::vector<Edge>& edges) {
  const int n = int(C.size());
  const BinCoords b = bin_coords(C, p.bin_grids, p.axis);
  const AxisMap m = axis_map(p.axis);

  // Root orders: lexicographic in (sgn*A, U, V, index); the reverse pass flips
  // only the axial key.
  std::vector<int> fwd(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) fwd[std::size_t(i)] = i;
  auto key = [&](int i, int flip) {
    return std::make_tuple(flip * b.sgn * b.A[std::size_t(i)], b.U[std::size_t(i)],
                           b.V[std::size_t(i)], i);
  };
  std::vector<int> rev = fwd;
  std::sort(fwd.begin(), fwd.end(), [&](int a, int c) { return key(a, +1) < key(c, +1); });
  std::sort(rev.begin(), rev.end(), [&](int a, int c) { return key(a, -1) < key(c, -1); });

  std::vector<std::vector<int>> orders;
  orders.push_back(std::move(fwd));
  if (p.reverse_pass) orders.push_back(std::move(rev));

  struct Cand {
    double d_ax;
    double lat;
    int j;
  };
  std::vector<Cand> cand;

  for (const auto& order : orders) {
    for (int i : order) {
      if (deg[std::size_t(i)] == p.deg_max) continue;
      cand.clear();
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const int dA = b.A[std::size_t(j)] - b.A[std::size_t(i)];
        if (b.sgn * dA <= 0) continue;
        if (std::abs(dA) > p.A_max) continue;
        if (std::abs(b.U[std::size_t(j)] - b.U[std::size_t(i)]) +
                std::abs(b.V[std::size_t(j)] - b.V[std::size_t(i)]) >
            p.R_side)
          continue;
        const Vec3 d = C.points[std::size_t(j)] - C.points[std::size_t(i)];
        const double d_ax = p.axial_metric == AxialMetric::Continuous
                                ? double(m.sgn) * d[m.ax]
                                : double(std::abs(dA));
        const double lat = std::sqrt(d[m.lat1] * d[m.lat1] + d[m.lat2] * d[m.lat2]);
        cand.push_back({d_ax, lat, j});
      }
      std::sort(cand.begin(), cand.end(), [](const Cand& a, const Cand& c) {
        return std::tie(a.d_ax, a.lat, a.j) < std::tie(c.d_ax, c.lat, c.j);
      });
      if (int(cand.size()) > p.K) cand.resize(std::size_t(p.K));

      for (const Cand& cd : cand) {
        const int j = cd.j;
        if (deg[std::size_t(i)] == p.deg_max || deg[std::size_t(j)] == p.deg_max) continue;
        const std::pair<int, int> e{std::min(i, j), std::max(i, j)};
        if (dedup.count(e)) continue;
        if (gates.cluster_on && !cluster_gate(i, j, *gates.per_label, C, gates.tau)) continue;
        if (gates.between_on) {
          const double phi = hit_fraction(C.points[std::size_t(i)], C.points[std::size_t(j)],
                                          *gates.union_index, gates.s, gates.r);
          if (phi < gates.phi_min) continue;
        }
        edges.push_back(
            {e.first, e.second, dist(C.points[std::size_t(i)], C.points[std::size_t(j)])});
        dedup.insert(e);
        ++deg[std::size_t(i)];
        ++deg[std::size_t(j)];
      }
    }
  }
}

struct GateResources {
  std::optional<LabelIndexMap> per_label;
  std::optional<PointIndex> union_index;
  GateContext ctx;
};

inline GateResources prepare_gates(const CentroidTable& C, const LabeledVolume& v,
                                   const GraphParams& p) {
  GateResources res;
  const bool any_gate = p.cluster_tau.has_value() || p.between.has_value();
  if (!any_gate) return res;
  const auto centers = labeled_voxel_centers(v);
  if (centers.empty())
    throw std::invalid_argument("build_graph: gates enabled but the volume has no labels");
  if (p.cluster_tau) {
    res.per_label = build_label_indices(v);
    for (std::uint32_t l : C.labels)
      if (!res.per_label->count(l))
        throw std::invalid_argument("build_graph: node label " + std::to_string(l) +
                                    " has no voxels in the volume");
    res.ctx.cluster_on = true;
    res.ctx.tau = *p.cluster_tau;
  }
  if (p.between) {
    res.union_index.emplace(centers);
    res.ctx.between_on = true;
    res.ctx.s = p.between->s_vox * v.spec.min_spacing();
    res.ctx.r = p.between->r_vox * v.spec.min_spacing();
    res.ctx.phi_min = p.between->phi_min;
  }
  res.ctx.per_label = res.per_label ? &*res.per_label : nullptr;
  res.ctx.union_index = res.union_index ? &*res.union_index : nullptr;
  return res;
}

}  // namespace graph_detail

// Data-driven common bin width: half the median distance from a node to its
// nearest other node. On a regular lattice of pitch p this gives p/2, small
// enough that no two distinct lattice planes share an axial bin.
inline double auto_bin_width(const CentroidTable& C) {
  if (C.size() < 2) return 1.0;
  PointIndex idx(C.points);
  std::vector<double> nn;
  nn.reserve(C.size());
  for (const auto& p : C.points) {
    const double d = idx.second_nearest_distance(p);  // nearest is p itself at 0
    if (d > 0.0) nn.push_back(d);
  }
  if (nn.empty()) return 1.0;
  std::nth_element(nn.begin(), nn.begin() + std::ptrdiff_t(nn.size() / 2), nn.end());
  return 0.5 * nn[nn.size() / 2];
}

inline LatticeGraph build_graph(const CentroidTable& C, const LabeledVolume& v,
                                const GraphParams& params) {
  validate(params);
  if (C.size() == 0) throw std::invalid_argument("build_graph: empty centroid table");
  auto gates = graph_detail::prepare_gates(C, v, params);
  LatticeGraph g;
  g.nodes = C;
  g.deg.assign(C.size(), 0);
  std::set<std::pair<int, int>> dedup;
  graph_detail::run_axis_passes(C, params, gates.ctx, g.deg, dedup, g.edges);
  return g;
}

// Gate-free convenience overload.
inline LatticeGraph build_graph(const CentroidTable& C, const GraphParams& params) {
  if (params.cluster_tau || params.between)
    throw std::invalid_argument("build_graph: gates require a labeled volume");
  LabeledVolume none{GridSpec{}, {0}};
  return build_graph(C, none, params);
}

// Union of single-axis constructions over several directions, sharing the
// degree counters and the duplicate-suppression set across all of them. A
// single direction can only propose edges that advance along it, so lattices
// with edges in several directions are recovered by running one pass per
// direction into a common graph.
inline LatticeGraph build_graph_axes(const CentroidTable& C, const LabeledVolume& v,
                                     const GraphParams& params, const std::vector<Axis>& axes) {
  validate(params);
  if (C.size() == 0) throw std::invalid_argument("build_graph: empty centroid table");
  if (axes.empty()) throw std::invalid_argument("build_graph_axes: empty axis list");
  auto gates = graph_detail::prepare_gates(C, v, params);
  LatticeGraph g;
  g.nodes = C;
  g.deg.assign(C.size(), 0);
  std::set<std::pair<int, int>> dedup;
  for (Axis a : axes) {
    GraphParams p = params;
    p.axis = a;
    graph_detail::run_axis_passes(C, p, gates.ctx, g.deg, dedup, g.edges);
  }
  return g;
}

}  // namespace detlat

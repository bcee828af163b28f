#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "detlat/geometry.hpp"

namespace detlat {

// Triangulated closed surface; faces index vertices and wind outward.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};

// Every undirected edge must be shared by exactly two faces traversing it in
// opposite directions, and all indices must be valid and per-face distinct.
inline bool is_closed_manifold(const TriMesh& m) {
  if (m.faces.empty()) return false;
  const int nv = int(m.vertices.size());
  // (min,max) -> [count of (min->max) traversals, count of (max->min)]
  std::map<std::pair<int, int>, std::array<int, 2>> edges;
  for (const auto& f : m.faces) {
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) return false;
    for (int v : f)
      if (v < 0 || v >= nv) return false;
    for (int e = 0; e < 3; ++e) {
      const int a = f[std::size_t(e)];
      const int b = f[std::size_t((e + 1) % 3)];
      auto& slot = edges[{std::min(a, b), std::max(a, b)}];
      ++slot[a < b ? 0 : 1];
    }
  }
  for (const auto& [edge, dirs] : edges)
    if (dirs[0] != 1 || dirs[1] != 1) return false;
  return true;
}

// Divergence-theorem volume over signed tetrahedra against the origin.
inline double mesh_volume(const TriMesh& m) {
  if (!is_closed_manifold(m)) throw std::invalid_argument("mesh_volume: open mesh");
  double six_v = 0.0;
  for (const auto& f : m.faces) {
    const Vec3& a = m.vertices[std::size_t(f[0])];
    const Vec3& b = m.vertices[std::size_t(f[1])];
    const Vec3& c = m.vertices[std::size_t(f[2])];
    six_v += dot(a, cross(b, c));
  }
  return std::abs(six_v) / 6.0;
}

inline std::array<double, 3> axis_extents(const TriMesh& m) {
  if (m.vertices.empty()) throw std::invalid_argument("axis_extents: empty mesh");
  Vec3 lo = m.vertices[0], hi = m.vertices[0];
  for (const auto& v : m.vertices)
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], v[a]);
      hi[a] = std::max(hi[a], v[a]);
    }
  return {hi.x - lo.x, hi.y - lo.y, hi.z - lo.z};
}

// ASCII triangle list: `v x y z` per vertex then `f i j k` per face, indices
// 1-based in file order.
inline void write_mesh_ascii(std::ostream& os, const TriMesh& m) {
  char buf[128];
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
    os << buf;
  }
  for (const auto& f : m.faces) {
    std::snprintf(buf, sizeof buf, "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
    os << buf;
  }
}

}  // namespace detlat

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "detlat/geometry.hpp"
#include "detlat/trimesh.hpp"

namespace detlat {

// Input whose points are collinear/coplanar within tolerance; callers that
// probe hullability (degenerate-void skipping) catch exactly this.
struct DegenerateHullError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace hull_detail {

struct Face {
  int a, b, c;
  Vec3 n;          // cross(b-a, c-a), unnormalized
  double n_len;    // |n|
  bool alive = true;
  std::vector<int> outside;  // conflict list, exclusive ownership
};

inline Vec3 face_normal(const std::vector<Vec3>& P, int a, int b, int c) {
  return cross(P[std::size_t(b)] - P[std::size_t(a)], P[std::size_t(c)] - P[std::size_t(a)]);
}

// geometric signed distance of p from the face plane times |n|
inline double signed_side(const std::vector<Vec3>& P, const Face& f, const Vec3& p) {
  return dot(f.n, p - P[std::size_t(f.a)]);
}

}  // namespace hull_detail

// Quickhull. Tolerance for all sidedness decisions is eps = 1e-9 times the
// bounding-box diagonal; every input point ends up inside or within eps of
// the output surface.
inline TriMesh convex_hull(const std::vector<Vec3>& points) {
  using hull_detail::Face;
  const int n = int(points.size());
  if (n < 4) throw DegenerateHullError("convex_hull: need at least 4 points");

  Vec3 lo = points[0], hi = points[0];
  for (const auto& p : points)
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  const double diag = norm(hi - lo);
  const double eps = 1e-9 * diag;
  if (!(diag > 0.0)) throw DegenerateHullError("convex_hull: all points coincide");

  // initial simplex: farthest pair among axis extremes, then farthest from
  // their line, then farthest from the plane of the three
  std::array<int, 6> extreme{};
  for (int a = 0; a < 3; ++a) {
    int imin = 0, imax = 0;
    for (int i = 1; i < n; ++i) {
      if (points[std::size_t(i)][a] < points[std::size_t(imin)][a]) imin = i;
      if (points[std::size_t(i)][a] > points[std::size_t(imax)][a]) imax = i;
    }
    extreme[std::size_t(2 * a)] = imin;
    extreme[std::size_t(2 * a + 1)] = imax;
  }
  int i0 = extreme[0], i1 = extreme[1];
  double best = -1.0;
  for (int u : extreme)
    for (int v : extreme) {
      const double d = dist_sq(points[std::size_t(u)], points[std::size_t(v)]);
      if (d > best) {
        best = d;
        i0 = u;
        i1 = v;
      }
    }
  if (!(std::sqrt(best) > eps)) throw DegenerateHullError("convex_hull: points nearly coincide");

  const Vec3 dir = points[std::size_t(i1)] - points[std::size_t(i0)];
  int i2 = -1;
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = norm(cross(points[std::size_t(i)] - points[std::size_t(i0)], dir));
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (!(best / norm(dir) > eps)) throw DegenerateHullError("convex_hull: collinear input");

  Vec3 pn = hull_detail::face_normal(points, i0, i1, i2);
  int i3 = -1;
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(dot(pn, points[std::size_t(i)] - points[std::size_t(i0)]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (!(best / norm(pn) > eps)) throw DegenerateHullError("convex_hull: coplanar input");

  const Vec3 inner = (points[std::size_t(i0)] + points[std::size_t(i1)] +
                      points[std::size_t(i2)] + points[std::size_t(i3)]) *
                     0.25;
  std::vector<Face> faces;
  auto add_face = [&](int a, int b, int c) {
    Face f{a, b, c, {}, 0.0, true, {}};
    f.n = hull_detail::face_normal(points, a, b, c);
    if (dot(f.n, inner - points[std::size_t(a)]) > 0.0) {  // keep the tetra center below
      std::swap(f.b, f.c);
      f.n = hull_detail::face_normal(points, f.a, f.b, f.c);
    }
    f.n_len = norm(f.n);
    faces.push_back(std::move(f));
    return int(faces.size()) - 1;
  };
  add_face(i0, i1, i2);
  add_face(i0, i1, i3);
  add_face(i0, i2, i3);
  add_face(i1, i2, i3);

  // Exclusive conflict ownership: a point joins the first live face it is
  // strictly outside of. Returns that face or -1 when the point is inside.
  auto assign = [&](int point) {
    for (int fi = 0; fi < int(faces.size()); ++fi) {
      Face& f = faces[std::size_t(fi)];
      if (!f.alive) continue;
      if (hull_detail::signed_side(points, f, points[std::size_t(point)]) > eps * f.n_len) {
        f.outside.push_back(point);
        return fi;
      }
    }
    return -1;
  };
  for (int i = 0; i < n; ++i)
    if (i != i0 && i != i1 && i != i2 && i != i3) assign(i);

  std::vector<int> pending;  // faces that may still own outside points
  for (int fi = 0; fi < int(faces.size()); ++fi)
    if (!faces[std::size_t(fi)].outside.empty()) pending.push_back(fi);

  while (!pending.empty()) {
    const int fi = pending.back();
    pending.pop_back();
    Face& f = faces[std::size_t(fi)];
    if (!f.alive || f.outside.empty()) continue;

    // apex: farthest conflict point of this face (first index wins ties)
    int apex = f.outside[0];
    double far_d = -1.0;
    for (int p : f.outside) {
      const double d = hull_detail::signed_side(points, f, points[std::size_t(p)]) / f.n_len;
      if (d > far_d) {
        far_d = d;
        apex = p;
      }
    }
    const Vec3& ap = points[std::size_t(apex)];

    // visible set and orphaned conflict points
    std::vector<int> visible;
    std::vector<int> orphans;
    for (int gi = 0; gi < int(faces.size()); ++gi) {
      Face& g = faces[std::size_t(gi)];
      if (!g.alive) continue;
      if (hull_detail::signed_side(points, g, ap) > eps * g.n_len) {
        visible.push_back(gi);
        for (int p : g.outside)
          if (p != apex) orphans.push_back(p);
        g.outside.clear();
        g.alive = false;
      }
    }

    // horizon: directed edges of visible faces whose twin is on a live face
    std::set<std::pair<int, int>> visible_edges;
    for (int gi : visible) {
      const Face& g = faces[std::size_t(gi)];
      const int vs[3] = {g.a, g.b, g.c};
      for (int e = 0; e < 3; ++e) visible_edges.insert({vs[e], vs[(e + 1) % 3]});
    }
    for (int gi : visible) {
      // copy the triple: add_face may reallocate the face array
      const int vs[3] = {faces[std::size_t(gi)].a, faces[std::size_t(gi)].b,
                         faces[std::size_t(gi)].c};
      for (int e = 0; e < 3; ++e) {
        const int u = vs[e], v = vs[(e + 1) % 3];
        if (visible_edges.count({v, u})) continue;  // interior to the visible region
        add_face(u, v, apex);
      }
    }
    // an orphan may sit outside a surviving old face it never owned, so the
    // rescan covers every live face; owners re-enter the queue (stale or
    // duplicate queue entries are filtered on pop)
    for (int p : orphans) {
      const int owner = assign(p);
      if (owner >= 0) pending.push_back(owner);
    }
  }

  // compact to the hull's own vertex numbering (ascending input order)
  std::vector<int> used;
  for (const auto& f : faces)
    if (f.alive) {
      used.push_back(f.a);
      used.push_back(f.b);
      used.push_back(f.c);
    }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  std::vector<int> remap(std::size_t(n), -1);
  TriMesh out;
  for (std::size_t i = 0; i < used.size(); ++i) {
    remap[std::size_t(used[i])] = int(i);
    out.vertices.push_back(points[std::size_t(used[i])]);
  }
  for (const auto& f : faces)
    if (f.alive)
      out.faces.push_back({remap[std::size_t(f.a)], remap[std::size_t(f.b)],
                           remap[std::size_t(f.c)]});
  return out;
}

}  // namespace detlat

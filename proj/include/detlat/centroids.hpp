#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "detlat/edt.hpp"
#include "detlat/geometry.hpp"
#include "detlat/grid.hpp"

namespace detlat {

// One row per distinct nonzero label, sorted by label ascending.
struct CentroidTable {
  std::vector<std::uint32_t> labels;
  std::vector<Vec3> points;

  std::size_t size() const { return labels.size(); }
};

namespace centroid_detail {

// Both centers are accumulated in grid-local coordinates and the origin is
// added once at the end, so translating the origin translates the result by
// exactly the same amount.
struct LocalCenters {
  Vec3 dt_weighted;  // sum(center * dt) / sum(dt), origin not yet added
  Vec3 lis;          // center of the EDT argmax voxel, origin not yet added
};

inline LocalCenters local_centers(const LabeledVolume& vol, std::uint32_t id) {
  const CroppedEdt c = label_edt_squared_cropped(vol, id);
  const auto& s = vol.spec.spacing;

  Vec3 wsum{0.0, 0.0, 0.0};
  double wtot = 0.0;
  double best_d2 = -1.0;
  Vec3 best_center{0.0, 0.0, 0.0};

  std::size_t n = 0;
  for (int k = c.box.lo[2]; k <= c.box.hi[2]; ++k)
    for (int j = c.box.lo[1]; j <= c.box.hi[1]; ++j)
      for (int i = c.box.lo[0]; i <= c.box.hi[0]; ++i, ++n) {
        if (vol.at(i, j, k) != id) continue;
        const double d2 = c.d2[n];
        const double dt = std::sqrt(d2);
        const Vec3 p{i * s[0], j * s[1], k * s[2]};
        wsum = wsum + p * dt;
        wtot += dt;
        // Scan order is ascending (k,j,i) lexicographic, so keeping the first
        // strict maximum realizes the smallest-index tie-break.
        if (d2 > best_d2) {
          best_d2 = d2;
          best_center = p;
        }
      }
  // Every label voxel is within one spacing of background (virtual background
  // beyond the grid faces), so dt > 0 and the total weight is positive.
  return {Vec3{wsum.x / wtot, wsum.y / wtot, wsum.z / wtot}, best_center};
}

}  // namespace centroid_detail

inline Vec3 dt_weighted_center(const LabeledVolume& vol, std::uint32_t id) {
  const auto lc = centroid_detail::local_centers(vol, id);
  const auto& o = vol.spec.origin;
  return {lc.dt_weighted.x + o[0], lc.dt_weighted.y + o[1], lc.dt_weighted.z + o[2]};
}

inline Vec3 lis_center(const LabeledVolume& vol, std::uint32_t id) {
  const auto lc = centroid_detail::local_centers(vol, id);
  const auto& o = vol.spec.origin;
  return {lc.lis.x + o[0], lc.lis.y + o[1], lc.lis.z + o[2]};
}

// Instance centroid: unweighted per-coordinate mean of the dt-weighted center
// and the LIS center.
inline Vec3 label_centroid(const LabeledVolume& vol, std::uint32_t id) {
  const auto lc = centroid_detail::local_centers(vol, id);
  const Vec3 m = (lc.dt_weighted + lc.lis) * 0.5;
  const auto& o = vol.spec.origin;
  return {m.x + o[0], m.y + o[1], m.z + o[2]};
}

inline CentroidTable centroid_table(const LabeledVolume& vol) {
  const auto ids = labels_present(vol);
  if (ids.empty()) throw std::invalid_argument("centroid_table: volume has no instances");
  CentroidTable t;
  t.labels = ids;
  t.points.reserve(ids.size());
  for (std::uint32_t id : ids) t.points.push_back(label_centroid(vol, id));
  return t;
}

}  // namespace detlat

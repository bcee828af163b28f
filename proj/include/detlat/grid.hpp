#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "detlat/geometry.hpp"

namespace detlat {

// Rectilinear voxel grid. Voxel (i,j,k) has its center at
// origin + (i*dx, j*dy, k*dz); arrays are stored x-fastest.
struct GridSpec {
  std::array<int, 3> dims{1, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  std::size_t voxel_count() const {
    return std::size_t(dims[0]) * std::size_t(dims[1]) * std::size_t(dims[2]);
  }
  std::size_t index(int i, int j, int k) const {
    return std::size_t(i) + std::size_t(dims[0]) * (std::size_t(j) + std::size_t(dims[1]) * std::size_t(k));
  }
  Vec3 voxel_center(int i, int j, int k) const {
    return {origin[0] + i * spacing[0], origin[1] + j * spacing[1], origin[2] + k * spacing[2]};
  }
  // Center relative to the origin; adding the origin once at the end keeps
  // derived centers exactly translation-equivariant.
  Vec3 local_center(int i, int j, int k) const {
    return {i * spacing[0], j * spacing[1], k * spacing[2]};
  }
  double min_spacing() const {
    return std::min(spacing[0], std::min(spacing[1], spacing[2]));
  }
  bool in_bounds(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
  }
  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.dims == b.dims && a.spacing == b.spacing && a.origin == b.origin;
  }
};

inline void validate(const GridSpec& spec) {
  for (int a = 0; a < 3; ++a) {
    if (spec.dims[a] < 1)
      throw std::invalid_argument("GridSpec: dims must be >= 1");
    if (!(spec.spacing[a] > 0.0))
      throw std::invalid_argument("GridSpec: spacing must be > 0");
  }
}

// Integer instance labels over a grid; 0 is background.
struct LabeledVolume {
  GridSpec spec;
  std::vector<std::uint32_t> labels;

  std::uint32_t at(int i, int j, int k) const { return labels[spec.index(i, j, k)]; }
};

struct ScalarField {
  GridSpec spec;
  std::vector<double> values;

  double at(int i, int j, int k) const { return values[spec.index(i, j, k)]; }
};

inline LabeledVolume make_labeled(const GridSpec& spec, std::uint32_t fill = 0) {
  validate(spec);
  return {spec, std::vector<std::uint32_t>(spec.voxel_count(), fill)};
}

inline ScalarField make_field(const GridSpec& spec, double fill = 0.0) {
  validate(spec);
  return {spec, std::vector<double>(spec.voxel_count(), fill)};
}

inline void validate(const LabeledVolume& v) {
  validate(v.spec);
  if (v.labels.size() != v.spec.voxel_count())
    throw std::invalid_argument("LabeledVolume: payload length mismatch");
}

inline void validate(const ScalarField& f) {
  validate(f.spec);
  if (f.values.size() != f.spec.voxel_count())
    throw std::invalid_argument("ScalarField: payload length mismatch");
}

// Distinct nonzero labels in ascending order.
inline std::vector<std::uint32_t> labels_present(const LabeledVolume& v) {
  std::vector<std::uint32_t> out(v.labels.begin(), v.labels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (!out.empty() && out.front() == 0) out.erase(out.begin());
  return out;
}

struct VoxelBox {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{-1, -1, -1};  // inclusive; lo > hi means empty
  bool empty() const { return hi[0] < lo[0]; }
};

inline VoxelBox label_bbox(const LabeledVolume& v, std::uint32_t id) {
  VoxelBox box;
  box.lo = {v.spec.dims[0], v.spec.dims[1], v.spec.dims[2]};
  box.hi = {-1, -1, -1};
  std::size_t idx = 0;
  for (int k = 0; k < v.spec.dims[2]; ++k)
    for (int j = 0; j < v.spec.dims[1]; ++j)
      for (int i = 0; i < v.spec.dims[0]; ++i, ++idx)
        if (v.labels[idx] == id) {
          box.lo[0] = std::min(box.lo[0], i); box.hi[0] = std::max(box.hi[0], i);
          box.lo[1] = std::min(box.lo[1], j); box.hi[1] = std::max(box.hi[1], j);
          box.lo[2] = std::min(box.lo[2], k); box.hi[2] = std::max(box.hi[2], k);
        }
  if (box.hi[0] < box.lo[0]) box = VoxelBox{};
  return box;
}

}  // namespace detlat

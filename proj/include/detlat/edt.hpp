#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "detlat/grid.hpp"

namespace detlat {

namespace edt_detail {

// Large finite sentinel: stays well above any real squared distance while
// keeping parabola-intersection arithmetic finite (inf - inf would poison it).
constexpr double kFar = 1e100;

// Felzenszwalb-Huttenlocher lower envelope of parabolas, one scan line.
// On output d[p] = min_q ( w*(p-q)^2 + f[q] ), with w the squared spacing.
inline void dt_line(const double* f, double* d, int* v, double* z, int n, double w) {
  int k = 0;
  v[0] = 0;
  z[0] = -kFar;
  z[1] = kFar;
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + w * double(q) * q) - (f[p] + w * double(p) * p)) /
          (2.0 * w * (q - p));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  k = 0;
  for (int p = 0; p < n; ++p) {
    while (z[k + 1] < p) ++k;
    const double dq = double(p - v[k]);
    d[p] = w * (dq * dq) + f[v[k]];
  }
}

}  // namespace edt_detail

// Exact squared Euclidean distance from every true-voxel center to the nearest
// false voxel center, where everything outside the given box is implicitly
// false at the same spacing (the virtual-background rule: the first out-of-box
// plane sits one spacing beyond each face). False voxels get 0.
//
// Separable transform; the final value accumulates as
//   dz^2*sz^2 + (dy^2*sy^2 + dx^2*sx^2)
// which the exactness tests reproduce term-for-term.
inline std::vector<double> masked_edt_squared(const std::vector<char>& inside,
                                              std::array<int, 3> dims,
                                              std::array<double, 3> spacing) {
  const int nx = dims[0], ny = dims[1], nz = dims[2];
  if (inside.size() != std::size_t(nx) * ny * nz)
    throw std::invalid_argument("masked_edt_squared: mask length mismatch");
  // Pad by one so the implicit outside background participates as real zeros.
  const int px = nx + 2, py = ny + 2, pz = nz + 2;
  std::vector<double> g(std::size_t(px) * py * pz, 0.0);
  auto pidx = [&](int i, int j, int k) {
    return std::size_t(i) + std::size_t(px) * (std::size_t(j) + std::size_t(py) * k);
  };
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (inside[std::size_t(i) + std::size_t(nx) * (std::size_t(j) + std::size_t(ny) * k)])
          g[pidx(i + 1, j + 1, k + 1)] = edt_detail::kFar;

  const int nmax = std::max(px, std::max(py, pz));
  std::vector<double> f(nmax), d(nmax), z(nmax + 1);
  std::vector<int> v(nmax);

  const double wx = spacing[0] * spacing[0];
  const double wy = spacing[1] * spacing[1];
  const double wz = spacing[2] * spacing[2];

  // x pass
  for (int k = 0; k < pz; ++k)
    for (int j = 0; j < py; ++j) {
      for (int i = 0; i < px; ++i) f[i] = g[pidx(i, j, k)];
      edt_detail::dt_line(f.data(), d.data(), v.data(), z.data(), px, wx);
      for (int i = 0; i < px; ++i) g[pidx(i, j, k)] = d[i];
    }
  // y pass
  for (int k = 0; k < pz; ++k)
    for (int i = 0; i < px; ++i) {
      for (int j = 0; j < py; ++j) f[j] = g[pidx(i, j, k)];
      edt_detail::dt_line(f.data(), d.data(), v.data(), z.data(), py, wy);
      for (int j = 0; j < py; ++j) g[pidx(i, j, k)] = d[j];
    }
  // z pass
  for (int j = 0; j < py; ++j)
    for (int i = 0; i < px; ++i) {
      for (int k = 0; k < pz; ++k) f[k] = g[pidx(i, j, k)];
      edt_detail::dt_line(f.data(), d.data(), v.data(), z.data(), pz, wz);
      for (int k = 0; k < pz; ++k) g[pidx(i, j, k)] = d[k];
    }

  std::vector<double> out(std::size_t(nx) * ny * nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        out[std::size_t(i) + std::size_t(nx) * (std::size_t(j) + std::size_t(ny) * k)] =
            g[pidx(i + 1, j + 1, k + 1)];
  return out;
}

// Squared distances for one label over its bounding box. Any voxel of a
// different label (or outside the grid) is background. The nearest background
// voxel to any point of the label always lies within one voxel of the label's
// bounding box, so the crop loses nothing.
struct CroppedEdt {
  VoxelBox box;              // the label's bbox in volume indices
  std::array<int, 3> dims;   // crop extents = box size
  std::vector<double> d2;    // squared distances; 0 at non-label voxels
};

inline CroppedEdt label_edt_squared_cropped(const LabeledVolume& vol, std::uint32_t id) {
  validate(vol);
  const VoxelBox box = label_bbox(vol, id);
  if (box.empty())
    throw std::invalid_argument("label_edt: label " + std::to_string(id) + " not present");
  CroppedEdt c;
  c.box = box;
  c.dims = {box.hi[0] - box.lo[0] + 1, box.hi[1] - box.lo[1] + 1, box.hi[2] - box.lo[2] + 1};
  std::vector<char> inside(std::size_t(c.dims[0]) * c.dims[1] * c.dims[2], 0);
  std::size_t n = 0;
  for (int k = box.lo[2]; k <= box.hi[2]; ++k)
    for (int j = box.lo[1]; j <= box.hi[1]; ++j)
      for (int i = box.lo[0]; i <= box.hi[0]; ++i, ++n)
        inside[n] = vol.at(i, j, k) == id;
  c.d2 = masked_edt_squared(inside, c.dims, vol.spec.spacing);
  return c;
}

inline ScalarField label_edt_squared(const LabeledVolume& vol, std::uint32_t id) {
  const CroppedEdt c = label_edt_squared_cropped(vol, id);
  ScalarField out = make_field(vol.spec, 0.0);
  std::size_t n = 0;
  for (int k = c.box.lo[2]; k <= c.box.hi[2]; ++k)
    for (int j = c.box.lo[1]; j <= c.box.hi[1]; ++j)
      for (int i = c.box.lo[0]; i <= c.box.hi[0]; ++i, ++n)
        if (vol.at(i, j, k) == id) out.values[vol.spec.index(i, j, k)] = c.d2[n];
  return out;
}

// Euclidean distance (physical units) from each id voxel to the nearest
// non-id voxel center; 0 elsewhere.
inline ScalarField label_edt(const LabeledVolume& vol, std::uint32_t id) {
  ScalarField out = label_edt_squared(vol, id);
  for (double& x : out.values) x = std::sqrt(x);
  return out;
}

}  // namespace detlat

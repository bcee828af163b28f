#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "detlat/grid.hpp"

namespace detlat {

inline LabeledVolume threshold_field(const ScalarField& f, double t) {
  validate(f);
  if (!std::isfinite(t)) throw std::invalid_argument("threshold_field: t must be finite");
  LabeledVolume out{f.spec, std::vector<std::uint32_t>(f.values.size())};
  for (std::size_t i = 0; i < f.values.size(); ++i)
    out.labels[i] = f.values[i] >= t ? 1u : 0u;
  return out;
}

namespace cc_detail {

inline const std::vector<std::array<int, 3>>& neighbor_offsets(int connectivity) {
  static const std::vector<std::array<int, 3>> six = {
      {{-1, 0, 0}}, {{1, 0, 0}}, {{0, -1, 0}}, {{0, 1, 0}}, {{0, 0, -1}}, {{0, 0, 1}}};
  static const std::vector<std::array<int, 3>> twentysix = [] {
    std::vector<std::array<int, 3>> o;
    for (int dk = -1; dk <= 1; ++dk)
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di)
          if (di || dj || dk) o.push_back({di, dj, dk});
    return o;
  }();
  if (connectivity == 6) return six;
  if (connectivity == 26) return twentysix;
  throw std::invalid_argument("connected_components: connectivity must be 6 or 26");
}

}  // namespace cc_detail

// Components of the foreground (label 1) of a binary volume. Component IDs
// start at 1, assigned in first-encounter order of the x-fastest scan, so the
// output is deterministic.
inline LabeledVolume connected_components(const LabeledVolume& v, int connectivity) {
  validate(v);
  for (std::uint32_t l : v.labels)
    if (l > 1) throw std::invalid_argument("connected_components: input must be binary");
  const auto& offsets = cc_detail::neighbor_offsets(connectivity);
  const auto& spec = v.spec;
  LabeledVolume out = make_labeled(spec, 0);
  std::vector<std::size_t> stack;
  std::uint32_t next_id = 0;
  std::size_t idx = 0;
  for (int k = 0; k < spec.dims[2]; ++k)
    for (int j = 0; j < spec.dims[1]; ++j)
      for (int i = 0; i < spec.dims[0]; ++i, ++idx) {
        if (v.labels[idx] != 1 || out.labels[idx] != 0) continue;
        ++next_id;
        out.labels[idx] = next_id;
        stack.push_back(idx);
        while (!stack.empty()) {
          const std::size_t cur = stack.back();
          stack.pop_back();
          const int ci = int(cur % spec.dims[0]);
          const int cj = int((cur / spec.dims[0]) % spec.dims[1]);
          const int ck = int(cur / (std::size_t(spec.dims[0]) * spec.dims[1]));
          for (const auto& o : offsets) {
            const int ni = ci + o[0], nj = cj + o[1], nk = ck + o[2];
            if (!spec.in_bounds(ni, nj, nk)) continue;
            const std::size_t nidx = spec.index(ni, nj, nk);
            if (v.labels[nidx] == 1 && out.labels[nidx] == 0) {
              out.labels[nidx] = next_id;
              stack.push_back(nidx);
            }
          }
        }
      }
  return out;
}

}  // namespace detlat

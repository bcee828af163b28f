#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "detlat/centroids.hpp"
#include "detlat/lattice_graph.hpp"
#include "detlat/rng.hpp"
#include "oracles.hpp"

using namespace detlat;

namespace {

CentroidTable table_of(std::vector<Vec3> pts, std::vector<std::uint32_t> labels = {}) {
  CentroidTable t;
  if (labels.empty())
    for (std::size_t i = 0; i < pts.size(); ++i) labels.push_back(std::uint32_t(i + 1));
  t.labels = std::move(labels);
  t.points = std::move(pts);
  return t;
}

oracles::GraphOracleParams oracle_params(const GraphParams& p) {
  oracles::GraphOracleParams q;
  switch (p.axis) {  // mapping restated from its definition, not shared code
    case Axis::PosX: q.ax = 0; q.u_comp = 1; q.v_comp = 2; q.sgn = +1; break;
    case Axis::NegX: q.ax = 0; q.u_comp = 1; q.v_comp = 2; q.sgn = -1; break;
    case Axis::PosY: q.ax = 1; q.u_comp = 0; q.v_comp = 2; q.sgn = +1; break;
    case Axis::NegY: q.ax = 1; q.u_comp = 0; q.v_comp = 2; q.sgn = -1; break;
    case Axis::PosZ: q.ax = 2; q.u_comp = 0; q.v_comp = 1; q.sgn = +1; break;
    case Axis::NegZ: q.ax = 2; q.u_comp = 0; q.v_comp = 1; q.sgn = -1; break;
  }
  q.ux = p.bin_grids[0];
  q.uy = p.bin_grids[1];
  q.uz = p.bin_grids[2];
  q.A_max = p.A_max;
  q.R_side = p.R_side;
  q.K = p.K;
  q.deg_max = p.deg_max;
  q.reverse_pass = p.reverse_pass;
  q.continuous_axial = p.axial_metric == AxialMetric::Continuous;
  return q;
}

std::vector<std::array<double, 3>> raw_points(const CentroidTable& C) {
  std::vector<std::array<double, 3>> out;
  for (const auto& p : C.points) out.push_back({p.x, p.y, p.z});
  return out;
}

void require_same_graph(const LatticeGraph& got, const oracles::GraphOracleResult& want) {
  REQUIRE(got.edges.size() == want.E.size());
  for (std::size_t e = 0; e < want.E.size(); ++e) {
    CAPTURE(e);
    REQUIRE(got.edges[e].i == want.E[e].i);
    REQUIRE(got.edges[e].j == want.E[e].j);
    REQUIRE(got.edges[e].length == want.E[e].length);  // bit-for-bit
  }
  REQUIRE(got.deg == want.deg);
}

// Blobby random volume for gate tests: a few solid boxes per label.
LabeledVolume random_label_boxes(SplitMix64& rng, int max_side, int n_labels) {
  GridSpec spec;
  for (int a = 0; a < 3; ++a) spec.dims[a] = 6 + int(rng.next() % std::uint64_t(max_side - 5));
  spec.spacing = {1.0, 1.0, 1.0};
  spec.origin = {0.5, 0.5, 0.5};
  auto v = make_labeled(spec);
  for (int l = 1; l <= n_labels; ++l) {
    std::array<int, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
      lo[a] = int(rng.next() % std::uint64_t(spec.dims[a]));
      hi[a] = std::min(spec.dims[a] - 1, lo[a] + 1 + int(rng.next() % 3));
    }
    for (int k = lo[2]; k <= hi[2]; ++k)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i) v.labels[spec.index(i, j, k)] = std::uint32_t(l);
  }
  return v;
}

}  // namespace

TEST_CASE("bin_coords basics") {
  SECTION("single point maps to the zero bin") {
    auto C = table_of({{3.7, -1.2, 5.5}});
    auto b = bin_coords(C, {1.0, 1.0, 1.0}, Axis::PosX);
    REQUIRE(b.I == std::vector<int>{0});
    REQUIRE(b.J == std::vector<int>{0});
    REQUIRE(b.K_bin == std::vector<int>{0});
  }
  SECTION("floor semantics at the bin edge") {
    auto C = table_of({{0.0, 0, 0}, {0.9, 0, 0}, {1.0, 0, 0}});
    auto b = bin_coords(C, {1.0, 1.0, 1.0}, Axis::PosX);
    REQUIRE(b.I == std::vector<int>{0, 0, 1});
  }
  SECTION("+Y mapping: A=J, (U,V)=(I,K), sgn=+1") {
    auto C = table_of({{0.0, 0.0, 0.0}, {0.5, 2.2, 1.1}});
    auto b = bin_coords(C, {0.5, 1.0, 1.0}, Axis::PosY);
    REQUIRE(b.I == std::vector<int>{0, 1});
    REQUIRE(b.J == std::vector<int>{0, 2});
    REQUIRE(b.K_bin == std::vector<int>{0, 1});
    REQUIRE(b.A == b.J);
    REQUIRE(b.U == b.I);
    REQUIRE(b.V == b.K_bin);
    REQUIRE(b.sgn == +1);
    auto bn = bin_coords(C, {0.5, 1.0, 1.0}, Axis::NegY);
    REQUIRE(bn.sgn == -1);
    REQUIRE(bn.A == b.A);
  }
  SECTION("nonpositive grid rejected") {
    auto C = table_of({{0, 0, 0}});
    REQUIRE_THROWS_AS(bin_coords(C, {1.0, 0.0, 1.0}, Axis::PosX), std::invalid_argument);
  }
}

TEST_CASE("build_graph smallest cases") {
  GraphParams p;  // defaults, gates off
  SECTION("single node") {
    auto g = build_graph(table_of({{1, 2, 3}}), p);
    REQUIRE(g.edges.empty());
    REQUIRE(g.deg == std::vector<int>{0});
  }
  SECTION("two nodes along +X connect once with exact length") {
    auto g = build_graph(table_of({{0, 0, 0}, {1.25, 0, 0}}), p);
    REQUIRE(g.edges.size() == 1);
    REQUIRE(g.edges[0].i == 0);
    REQUIRE(g.edges[0].j == 1);
    REQUIRE(g.edges[0].length == 1.25);
    REQUIRE(g.deg == std::vector<int>{1, 1});
  }
  SECTION("same axial bin never connects") {
    auto g = build_graph(table_of({{0.2, 0, 0}, {0.8, 1.0, 0}}), p);
    REQUIRE(g.edges.empty());
  }
  SECTION("-X connects in the opposite direction") {
    GraphParams pn = p;
    pn.axis = Axis::NegX;
    auto g = build_graph(table_of({{0, 0, 0}, {1.25, 0, 0}}), pn);
    REQUIRE(g.edges.size() == 1);
    REQUIRE(g.edges[0].length == 1.25);
  }
  SECTION("axial span beyond A_max excluded") {
    GraphParams pa = p;
    pa.A_max = 2;
    auto g = build_graph(table_of({{0, 0, 0}, {3.5, 0, 0}}), pa);  // bin span 3
    REQUIRE(g.edges.empty());
    auto g2 = build_graph(table_of({{0, 0, 0}, {2.5, 0, 0}}), pa);  // span 2, at the cap
    REQUIRE(g2.edges.size() == 1);
  }
  SECTION("lateral offset beyond R_side excluded") {
    GraphParams pr = p;
    pr.R_side = 1;
    auto g = build_graph(table_of({{0, 0, 0}, {1.0, 1.1, 1.1}}), pr);
    REQUIRE(g.edges.empty());
  }
  SECTION("empty table rejected") {
    REQUIRE_THROWS_AS(build_graph(CentroidTable{}, p), std::invalid_argument);
  }
  SECTION("bad params rejected") {
    GraphParams bad = p;
    bad.K = 0;
    REQUIRE_THROWS_AS(build_graph(table_of({{0, 0, 0}}), bad), std::invalid_argument);
    bad = p;
    bad.A_max = 0;
    REQUIRE_THROWS_AS(build_graph(table_of({{0, 0, 0}}), bad), std::invalid_argument);
    bad = p;
    bad.cluster_tau = -1.0;
    REQUIRE_THROWS_AS(build_graph(table_of({{0, 0, 0}}), bad), std::invalid_argument);
  }
  SECTION("gates demand a volume through the convenience overload") {
    GraphParams pg = p;
    pg.cluster_tau = 1.0;
    REQUIRE_THROWS_AS(build_graph(table_of({{0, 0, 0}}), pg), std::invalid_argument);
  }
}

TEST_CASE("3x3x3 jitter-free grid matches the literal transcription") {
  std::vector<Vec3> pts;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) pts.push_back({1.7 * i, 1.7 * j, 1.7 * k});
  auto C = table_of(pts);
  GraphParams p;
  p.axis = Axis::PosX;
  p.K = 2;
  p.deg_max = 4;
  auto got = build_graph(C, p);
  auto want = oracles::graph_oracle(raw_points(C), C.labels, {}, {}, oracle_params(p));
  require_same_graph(got, want);
  REQUIRE_FALSE(got.edges.empty());
}

TEST_CASE("randomized gate-free parity with the literal transcription") {
  SplitMix64 rng(0xA11CE5ED);
  const Axis axes[6] = {Axis::PosX, Axis::NegX, Axis::PosY,
                        Axis::NegY, Axis::PosZ, Axis::NegZ};
  for (int trial = 0; trial < 50; ++trial) {
    CAPTURE(trial);
    const int n = 1 + int(rng.next() % 40);
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i)
      pts.push_back({rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 10)});
    auto C = table_of(pts);
    GraphParams p;
    p.axis = axes[rng.next() % 6];
    for (auto& u : p.bin_grids) u = rng.uniform(0.4, 2.5);
    p.A_max = 1 + int(rng.next() % 4);
    p.R_side = int(rng.next() % 4);
    p.K = 1 + int(rng.next() % 5);
    p.deg_max = 1 + int(rng.next() % 6);
    p.reverse_pass = (rng.next() & 1) != 0;
    p.axial_metric = (rng.next() & 1) ? AxialMetric::Continuous : AxialMetric::BinUnits;
    auto got = build_graph(C, p);
    auto want = oracles::graph_oracle(raw_points(C), C.labels, {}, {}, oracle_params(p));
    require_same_graph(got, want);
  }
}

TEST_CASE("graph invariants on randomized configurations") {
  SplitMix64 rng(0xBEEF);
  const Axis axes[6] = {Axis::PosX, Axis::NegX, Axis::PosY,
                        Axis::NegY, Axis::PosZ, Axis::NegZ};
  for (int trial = 0; trial < 300; ++trial) {
    CAPTURE(trial);
    const int n = 1 + int(rng.next() % 30);
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i)
      pts.push_back({rng.uniform(0, 8), rng.uniform(0, 8), rng.uniform(0, 8)});
    auto C = table_of(pts);
    GraphParams p;
    p.axis = axes[rng.next() % 6];
    for (auto& u : p.bin_grids) u = rng.uniform(0.3, 2.0);
    p.A_max = 1 + int(rng.next() % 3);
    p.R_side = int(rng.next() % 3);
    p.K = 1 + int(rng.next() % 4);
    p.deg_max = 1 + int(rng.next() % 5);
    p.reverse_pass = (rng.next() & 1) != 0;
    auto g = build_graph(C, p);

    // degree cap + degree/edge bookkeeping
    std::vector<int> recount(std::size_t(n), 0);
    for (const auto& e : g.edges) {
      ++recount[std::size_t(e.i)];
      ++recount[std::size_t(e.j)];
    }
    REQUIRE(recount == g.deg);
    for (int d : g.deg) REQUIRE(d <= p.deg_max);
    // sparsity bound
    REQUIRE(2 * g.edges.size() <= std::size_t(n) * std::size_t(p.deg_max));
    // dedup + i<j + positive length + strict axial advance in bins
    auto b = bin_coords(C, p.bin_grids, p.axis);
    std::set<std::pair<int, int>> seen;
    for (const auto& e : g.edges) {
      REQUIRE(e.i < e.j);
      REQUIRE(e.length > 0.0);
      REQUIRE(seen.insert({e.i, e.j}).second);
      REQUIRE(b.A[std::size_t(e.i)] != b.A[std::size_t(e.j)]);
    }
    // determinism
    auto g2 = build_graph(C, p);
    REQUIRE(g2.edges.size() == g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) REQUIRE(g2.edges[e] == g.edges[e]);
  }
}

TEST_CASE("hit_fraction endpoints and coverage") {
  // 10x1x1 slab of unit voxels, centers (i+0.5, 0.5, 0.5)
  GridSpec spec;
  spec.dims = {10, 1, 1};
  spec.spacing = {1, 1, 1};
  spec.origin = {0.5, 0.5, 0.5};
  auto v = make_labeled(spec);
  for (auto& l : v.labels) l = 1;
  PointIndex idx(labeled_voxel_centers(v));

  SECTION("fully embedded segment hits everywhere") {
    REQUIRE(hit_fraction({0.6, 0.5, 0.5}, {9.4, 0.5, 0.5}, idx, 0.5, 1.0) == 1.0);
  }
  SECTION("fully separated segment hits nowhere") {
    REQUIRE(hit_fraction({0.5, 50.5, 0.5}, {9.5, 50.5, 0.5}, idx, 0.5, 1.0) == 0.0);
  }
  SECTION("half-covered segment is 0.5 within 1/m") {
    // r = 0.5 covers the slab contiguously, so a sample hits iff x <= 10;
    // the segment [6,14] straddles that boundary at its midpoint
    const double s = 0.01;
    const double len = 8.0;
    const int m = std::max(2, int(std::ceil(len / s)) + 1);
    const double phi = hit_fraction({6.0, 0.5, 0.5}, {14.0, 0.5, 0.5}, idx, s, 0.5);
    REQUIRE(std::abs(phi - 0.5) <= 1.0 / double(m));
  }
  SECTION("identical endpoints rejected") {
    REQUIRE_THROWS_AS(hit_fraction({1, 1, 1}, {1, 1, 1}, idx, 0.5, 1.0), std::invalid_argument);
  }
  SECTION("bad step or radius rejected") {
    REQUIRE_THROWS_AS(hit_fraction({0, 0, 0}, {1, 0, 0}, idx, 0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(hit_fraction({0, 0, 0}, {1, 0, 0}, idx, 0.5, 0.0), std::invalid_argument);
  }
}

TEST_CASE("cluster_gate decisions") {
  // two 4x4x4 labeled blocks sharing the x-interface at x=4 (unit voxels)
  GridSpec spec;
  spec.dims = {8, 4, 4};
  spec.spacing = {1, 1, 1};
  spec.origin = {0.5, 0.5, 0.5};
  auto v = make_labeled(spec);
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 8; ++i) v.labels[spec.index(i, j, k)] = i < 4 ? 1u : 2u;
  auto per_label = build_label_indices(v);
  auto C = table_of({{3.0, 2.0, 2.0}, {6.0, 2.0, 2.0}}, {1u, 2u});

  SECTION("face-adjacent labels accepted at tau = 2 pitches") {
    REQUIRE(cluster_gate(0, 1, per_label, C, 2.0));
  }
  SECTION("far labels rejected for small tau") {
    auto far = table_of({{-20.0, 2.0, 2.0}, {40.0, 2.0, 2.0}}, {1u, 2u});
    REQUIRE_FALSE(cluster_gate(0, 1, per_label, far, 0.5));
  }
  SECTION("missing label index throws") {
    auto Cb = table_of({{0, 0, 0}, {1, 0, 0}}, {1u, 9u});
    REQUIRE_THROWS_AS(cluster_gate(0, 1, per_label, Cb, 1.0), std::invalid_argument);
  }
  SECTION("randomized decisions equal the linear-scan oracle") {
    SplitMix64 rng(77);
    auto vol = random_label_boxes(rng, 12, 5);
    auto clouds_map = build_label_indices(vol);
    std::map<std::uint32_t, std::vector<std::array<double, 3>>> raw_clouds;
    {
      std::size_t idx = 0;
      for (int k = 0; k < vol.spec.dims[2]; ++k)
        for (int j = 0; j < vol.spec.dims[1]; ++j)
          for (int i = 0; i < vol.spec.dims[0]; ++i, ++idx)
            if (vol.labels[idx] != 0) {
              auto c = vol.spec.voxel_center(i, j, k);
              raw_clouds[vol.labels[idx]].push_back({c.x, c.y, c.z});
            }
    }
    auto present = labels_present(vol);
    REQUIRE(present.size() >= 2);
    for (int t = 0; t < 40; ++t) {
      CAPTURE(t);
      const auto la = present[rng.next() % present.size()];
      const auto lb = present[rng.next() % present.size()];
      auto Cr = table_of({{rng.uniform(0, 12), rng.uniform(0, 12), rng.uniform(0, 12)},
                          {rng.uniform(0, 12), rng.uniform(0, 12), rng.uniform(0, 12)}},
                         {la, lb});
      const double tau = rng.uniform(0.1, 6.0);
      const double dij = oracles::cloud_min_dist(raw_clouds.at(lb), {Cr.points[0].x,
                                                 Cr.points[0].y, Cr.points[0].z});
      const double dji = oracles::cloud_min_dist(raw_clouds.at(la), {Cr.points[1].x,
                                                 Cr.points[1].y, Cr.points[1].z});
      REQUIRE(cluster_gate(0, 1, clouds_map, Cr, tau) == (std::min(dij, dji) <= tau));
    }
  }
}

TEST_CASE("gated construction matches the transcription and stays monotone") {
  SplitMix64 rng(0x6A7E);
  for (int trial = 0; trial < 8; ++trial) {
    CAPTURE(trial);
    auto v = random_label_boxes(rng, 14, 8);
    if (labels_present(v).empty()) continue;
    auto C = centroid_table(v);
    GraphParams base;
    base.axis = Axis::PosX;
    for (auto& u : base.bin_grids) u = rng.uniform(0.8, 2.0);
    base.K = 3;
    base.deg_max = 30;  // non-saturating: isolates gate effects from cap effects
    auto plain = build_graph(C, v, base);

    // gate parity vs the literal transcription
    GraphParams gated = base;
    gated.cluster_tau = rng.uniform(0.5, 4.0);
    gated.between = BetweenGateParams{0.5, 1.5, rng.uniform(0.2, 0.9)};
    auto got = build_graph(C, v, gated);
    auto P = oracle_params(gated);
    P.cluster_on = true;
    P.tau = *gated.cluster_tau;
    P.between_on = true;
    P.s = gated.between->s_vox * v.spec.min_spacing();
    P.r = gated.between->r_vox * v.spec.min_spacing();
    P.phi_min = gated.between->phi_min;
    std::map<std::uint32_t, std::vector<std::array<double, 3>>> clouds;
    std::vector<std::array<double, 3>> uni;
    {
      std::size_t idx = 0;
      for (int k = 0; k < v.spec.dims[2]; ++k)
        for (int j = 0; j < v.spec.dims[1]; ++j)
          for (int i = 0; i < v.spec.dims[0]; ++i, ++idx)
            if (v.labels[idx] != 0) {
              auto c = v.spec.voxel_center(i, j, k);
              clouds[v.labels[idx]].push_back({c.x, c.y, c.z});
              uni.push_back({c.x, c.y, c.z});
            }
    }
    auto want = oracles::graph_oracle(raw_points(C), C.labels, clouds, uni, P);
    require_same_graph(got, want);

    // with a non-saturating cap, gating can only remove edges
    std::set<std::pair<int, int>> plain_set;
    for (const auto& e : plain.edges) plain_set.insert({e.i, e.j});
    for (const auto& e : got.edges) REQUIRE(plain_set.count({e.i, e.j}) == 1);

    // raising phi_min only removes edges
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double phi : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      GraphParams p = base;
      p.between = BetweenGateParams{0.5, 1.5, phi};
      auto g = build_graph(C, v, p);
      REQUIRE(g.edges.size() <= prev);
      prev = g.edges.size();
    }
    // lowering tau only removes edges
    prev = std::numeric_limits<std::size_t>::max();
    for (double tau : {8.0, 4.0, 2.0, 1.0, 0.5, 0.25}) {
      GraphParams p = base;
      p.cluster_tau = tau;
      auto g = build_graph(C, v, p);
      REQUIRE(g.edges.size() <= prev);
      prev = g.edges.size();
    }
  }
}

TEST_CASE("multi-axis union shares caps and dedup") {
  // planar 3x3 node grid: +X alone finds only x-advancing edges, the
  // {+X,+Y} union also finds the vertical ones, and repeating an axis
  // changes nothing.
  std::vector<Vec3> pts;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) pts.push_back({double(i), double(j), 0.0});
  auto C = table_of(pts);
  GraphParams p;
  p.K = 1;  // nearest forward neighbor only
  p.R_side = 0;  // grid-aligned edges only
  LabeledVolume none{GridSpec{}, {0}};

  auto gx = build_graph(C, p);
  for (const auto& e : gx.edges) REQUIRE(C.points[std::size_t(e.j)].x >
                                         C.points[std::size_t(e.i)].x);
  REQUIRE(gx.edges.size() == 6);  // 2 unit x-steps per row, 3 rows

  auto gxy = build_graph_axes(C, none, p, {Axis::PosX, Axis::PosY});
  REQUIRE(gxy.edges.size() == 12);  // + 2 y-steps per column
  std::set<std::pair<int, int>> seen;
  for (const auto& e : gxy.edges) REQUIRE(seen.insert({e.i, e.j}).second);

  auto gxx = build_graph_axes(C, none, p, {Axis::PosX, Axis::PosX});
  REQUIRE(gxx.edges.size() == gx.edges.size());

  REQUIRE_THROWS_AS(build_graph_axes(C, none, p, {}), std::invalid_argument);
}

TEST_CASE("auto bin width tracks lattice pitch") {
  std::vector<Vec3> pts;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) pts.push_back({2.0 * i, 2.0 * j, 2.0 * k});
  REQUIRE(auto_bin_width(table_of(pts)) == 1.0);  // half the pitch
  REQUIRE(auto_bin_width(table_of({{1, 2, 3}})) == 1.0);  // degenerate fallback
}

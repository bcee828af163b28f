#include <catch2/catch_amalgamated.hpp>

#include "detlat/components.hpp"
#include "detlat/edt.hpp"
#include "detlat/rng.hpp"
#include "oracles.hpp"

using namespace detlat;

namespace {

LabeledVolume random_volume(SplitMix64& rng, int max_side, int max_label) {
  GridSpec spec;
  for (int a = 0; a < 3; ++a) {
    spec.dims[a] = 1 + int(rng.next() % std::uint64_t(max_side));
    spec.spacing[a] = 0.3 + 1.7 * rng.next_double();
    spec.origin[a] = rng.uniform(-5.0, 5.0);
  }
  auto v = make_labeled(spec);
  for (auto& l : v.labels) l = std::uint32_t(rng.next() % std::uint64_t(max_label + 1));
  return v;
}

}  // namespace

TEST_CASE("edt of an isolated voxel is one spacing") {
  auto v = make_labeled(GridSpec{{5, 5, 5}, {1, 1, 1}, {0, 0, 0}});
  v.labels[v.spec.index(2, 2, 2)] = 1;
  const auto d = label_edt(v, 1);
  REQUIRE(d.at(2, 2, 2) == 1.0);
  REQUIRE(d.at(2, 2, 1) == 0.0);
}

TEST_CASE("edt of a centered 3x3x3 cube") {
  auto v = make_labeled(GridSpec{{5, 5, 5}, {1, 1, 1}, {0, 0, 0}});
  for (int k = 1; k <= 3; ++k)
    for (int j = 1; j <= 3; ++j)
      for (int i = 1; i <= 3; ++i) v.labels[v.spec.index(i, j, k)] = 1;
  const auto d = label_edt(v, 1);
  REQUIRE(d.at(2, 2, 2) == 2.0);
  REQUIRE(d.at(1, 2, 2) == 1.0);
  REQUIRE(d.at(2, 3, 2) == 1.0);
  REQUIRE(d.at(1, 1, 1) == 1.0);
}

TEST_CASE("label touching the grid face still sees background one spacing out") {
  // A 1-voxel-thick slab hugging the i=0 face: without the virtual background
  // every slab voxel would be interior along x and some could reach dt = 0.
  auto v = make_labeled(GridSpec{{4, 3, 3}, {0.5, 0.5, 0.5}, {0, 0, 0}});
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) v.labels[v.spec.index(0, j, k)] = 1;
  const auto d = label_edt(v, 1);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) REQUIRE(d.at(0, j, k) == 0.5);
}

TEST_CASE("edt matches the all-pairs oracle bit-for-bit on random grids") {
  SplitMix64 rng(20240817);
  for (int trial = 0; trial < 60; ++trial) {
    const auto v = random_volume(rng, 12, 3);
    for (std::uint32_t id : labels_present(v)) {
      const auto got = label_edt_squared(v, id);
      const auto want = oracles::brute_edt_squared(v, id);
      REQUIRE(got.values == want);
    }
  }
}

TEST_CASE("edt rejects an absent label") {
  auto v = make_labeled(GridSpec{{3, 3, 3}, {1, 1, 1}, {0, 0, 0}});
  v.labels[0] = 2;
  REQUIRE_THROWS_AS(label_edt(v, 7), std::invalid_argument);
}

TEST_CASE("threshold_field is inclusive at the threshold") {
  auto f = make_field(GridSpec{{2, 2, 1}, {1, 1, 1}, {0, 0, 0}});
  f.values = {5.0, 5.0, 4.999, 6.0};
  const auto v = threshold_field(f, 5.0);
  REQUIRE(v.labels == std::vector<std::uint32_t>{1, 1, 0, 1});
  const auto none = threshold_field(f, 6.1);
  REQUIRE(none.labels == std::vector<std::uint32_t>{0, 0, 0, 0});
  REQUIRE_THROWS_AS(threshold_field(f, std::numeric_limits<double>::quiet_NaN()),
                    std::invalid_argument);
}

TEST_CASE("threshold at the median labels about half a random field") {
  SplitMix64 rng(99);
  auto f = make_field(GridSpec{{10, 10, 10}, {1, 1, 1}, {0, 0, 0}});
  for (auto& x : f.values) x = rng.next_double();
  auto sorted = f.values;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[499] + sorted[500]);
  const auto v = threshold_field(f, median);
  const auto count = std::count(v.labels.begin(), v.labels.end(), 1u);
  REQUIRE(std::abs(double(count) - 500.0) <= 1.0);
}

TEST_CASE("two isolated blobs give two components, a solid cube one") {
  auto v = make_labeled(GridSpec{{6, 4, 4}, {1, 1, 1}, {0, 0, 0}});
  v.labels[v.spec.index(0, 0, 0)] = 1;
  v.labels[v.spec.index(5, 3, 3)] = 1;
  const auto cc = connected_components(v, 6);
  REQUIRE(cc.at(0, 0, 0) == 1);
  REQUIRE(cc.at(5, 3, 3) == 2);

  auto cube = make_labeled(GridSpec{{4, 4, 4}, {1, 1, 1}, {0, 0, 0}}, 1);
  const auto one = connected_components(cube, 6);
  REQUIRE(labels_present(one) == std::vector<std::uint32_t>{1});
}

TEST_CASE("diagonal touch merges under 26-connectivity only") {
  auto v = make_labeled(GridSpec{{4, 4, 4}, {1, 1, 1}, {0, 0, 0}});
  v.labels[v.spec.index(1, 1, 1)] = 1;
  v.labels[v.spec.index(2, 2, 2)] = 1;
  REQUIRE(labels_present(connected_components(v, 6)).size() == 2);
  REQUIRE(labels_present(connected_components(v, 26)).size() == 1);
}

TEST_CASE("components match the BFS oracle on random binary grids") {
  SplitMix64 rng(4242);
  for (int trial = 0; trial < 30; ++trial) {
    auto v = random_volume(rng, 10, 0);
    for (auto& l : v.labels) l = std::uint32_t(rng.next() % 2);
    for (int conn : {6, 26}) {
      const auto got = connected_components(v, conn);
      const auto want = oracles::bfs_components(v, conn);
      REQUIRE(got.labels == want.labels);
    }
  }
}

TEST_CASE("connected_components rejects non-binary input") {
  auto v = make_labeled(GridSpec{{2, 2, 2}, {1, 1, 1}, {0, 0, 0}}, 3);
  REQUIRE_THROWS_AS(connected_components(v, 6), std::invalid_argument);
  auto ok = make_labeled(GridSpec{{2, 2, 2}, {1, 1, 1}, {0, 0, 0}}, 1);
  REQUIRE_THROWS_AS(connected_components(ok, 18), std::invalid_argument);
}

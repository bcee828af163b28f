#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "detlat/csv.hpp"
#include "detlat/grid.hpp"
#include "detlat/rng.hpp"
#include "detlat/vlf.hpp"

using namespace detlat;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "detlat_test_volume";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("grid indexing is x-fastest and voxel centers are cell midpoints") {
  GridSpec spec{{4, 3, 2}, {0.5, 0.25, 1.0}, {10.0, -2.0, 0.125}};
  REQUIRE(spec.voxel_count() == 24);
  REQUIRE(spec.index(0, 0, 0) == 0);
  REQUIRE(spec.index(1, 0, 0) == 1);
  REQUIRE(spec.index(0, 1, 0) == 4);
  REQUIRE(spec.index(0, 0, 1) == 12);
  REQUIRE(spec.index(3, 2, 1) == 23);

  const Vec3 c = spec.voxel_center(2, 1, 1);
  REQUIRE(c.x == 10.0 + 2 * 0.5);
  REQUIRE(c.y == -2.0 + 1 * 0.25);
  REQUIRE(c.z == 0.125 + 1 * 1.0);
  REQUIRE(spec.min_spacing() == 0.25);
}

TEST_CASE("grid validation rejects degenerate specs") {
  GridSpec bad_dim{{0, 3, 2}, {1, 1, 1}, {0, 0, 0}};
  REQUIRE_THROWS_AS(validate(bad_dim), std::invalid_argument);
  GridSpec bad_spacing{{2, 2, 2}, {1, 0.0, 1}, {0, 0, 0}};
  REQUIRE_THROWS_AS(validate(bad_spacing), std::invalid_argument);
  GridSpec neg_spacing{{2, 2, 2}, {1, -0.5, 1}, {0, 0, 0}};
  REQUIRE_THROWS_AS(validate(neg_spacing), std::invalid_argument);

  LabeledVolume short_payload{GridSpec{{2, 2, 2}, {1, 1, 1}, {0, 0, 0}},
                              std::vector<std::uint32_t>(7, 0)};
  REQUIRE_THROWS_AS(validate(short_payload), std::invalid_argument);
}

TEST_CASE("labels_present collects sorted distinct nonzero ids") {
  auto v = make_labeled(GridSpec{{3, 2, 1}, {1, 1, 1}, {0, 0, 0}});
  v.labels = {5, 0, 2, 2, 9, 5};
  REQUIRE(labels_present(v) == std::vector<std::uint32_t>{2, 5, 9});
}

TEST_CASE("label_bbox finds the inclusive support box") {
  auto v = make_labeled(GridSpec{{5, 4, 3}, {1, 1, 1}, {0, 0, 0}});
  v.labels[v.spec.index(1, 2, 0)] = 7;
  v.labels[v.spec.index(3, 1, 2)] = 7;
  const VoxelBox box = label_bbox(v, 7);
  REQUIRE(box.lo == std::array<int, 3>{1, 1, 0});
  REQUIRE(box.hi == std::array<int, 3>{3, 2, 2});
  REQUIRE(label_bbox(v, 99).empty());
}

TEST_CASE("labeled volume round-trips through disk") {
  auto v = make_labeled(GridSpec{{3, 2, 2}, {0.5, 0.5, 0.25}, {1.0, 2.0, 3.0}});
  for (std::size_t i = 0; i < v.labels.size(); ++i)
    v.labels[i] = std::uint32_t(i * 7 + 1);

  const auto base = (temp_dir() / "lab_roundtrip").string();
  save_volume(base, v);
  const LabeledVolume r = load_labeled_volume(base);
  REQUIRE(r.spec == v.spec);
  REQUIRE(r.labels == v.labels);
}

TEST_CASE("scalar field round-trips through disk at f32 precision") {
  auto f = make_field(GridSpec{{2, 2, 2}, {1, 1, 1}, {0, 0, 0}});
  // Values chosen exactly representable in binary32 so the trip is lossless.
  f.values = {0.0, 1.5, -2.25, 1024.0, 0.125, -0.5, 3.0, 7.75};

  const auto base = (temp_dir() / "f32_roundtrip").string();
  save_volume(base, f);
  const ScalarField r = load_scalar_field(base);
  REQUIRE(r.spec == f.spec);
  REQUIRE(r.values == f.values);
}

TEST_CASE("volume loader rejects malformed inputs") {
  const auto dir = temp_dir();
  auto v = make_labeled(GridSpec{{2, 2, 2}, {1, 1, 1}, {0, 0, 0}}, 3);
  const auto base = (dir / "bad").string();
  save_volume(base, v);

  SECTION("payload length mismatch") {
    std::ofstream(base + ".bin", std::ios::binary | std::ios::trunc) << "abc";
    REQUIRE_THROWS_AS(load_labeled_volume(base), IoError);
    try {
      load_labeled_volume(base);
    } catch (const IoError& e) {
      REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("payload length mismatch"));
    }
  }
  SECTION("missing header key") {
    std::ofstream(base + ".json", std::ios::trunc)
        << R"({"dims":[2,2,2],"spacing":[1,1,1],"origin":[0,0,0],"dtype":"u32","order":"x-fastest"})";
    REQUIRE_THROWS_AS(load_labeled_volume(base), IoError);
  }
  SECTION("wrong dtype") {
    REQUIRE_THROWS_AS(load_scalar_field(base), IoError);
  }
  SECTION("invalid json") {
    std::ofstream(base + ".json", std::ios::trunc) << "{not json";
    REQUIRE_THROWS_AS(load_labeled_volume(base), IoError);
  }
  SECTION("missing file") {
    REQUIRE_THROWS_AS(load_labeled_volume((dir / "nope").string()), IoError);
  }
}

TEST_CASE("format_g17 round-trips doubles exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -6.02214076e23, 0.0, -0.0, 42.0}) {
    const std::string s = format_g17(v);
    REQUIRE(std::stod(s) == v);
  }
}

TEST_CASE("csv writer and reader agree") {
  const auto path = (temp_dir() / "t.csv").string();
  {
    CsvWriter w(path);
    w.row({"a", "b", "c"});
    w.row({"1", "2.5", "x"});
    w.row({"", "0", ""});
  }
  const CsvTable t = read_csv(path);
  REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  REQUIRE(t.rows[0] == std::vector<std::string>{"1", "2.5", "x"});
  REQUIRE(t.rows[1] == std::vector<std::string>{"", "0", ""});
}

TEST_CASE("splitmix64 matches the reference sequence") {
  // Reference outputs for seed 1234567 from the public-domain splitmix64.c.
  SplitMix64 rng(1234567);
  REQUIRE(rng.next() == 0x599ed017fb08fc85ull);
  REQUIRE(rng.next() == 0x2c73f08458540fa5ull);
  REQUIRE(rng.next() == 0x883ebce5a3f27c77ull);
}

TEST_CASE("splitmix64 doubles land in the half-open unit interval") {
  SplitMix64 rng(42);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  REQUIRE(lo >= 0.0);
  REQUIRE(hi < 1.0);
  REQUIRE(sum / n == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("normal draws have unit-normal moments") {
  SplitMix64 rng(7);
  const int n = 50000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.normal();
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  REQUIRE(mean == Catch::Approx(0.0).margin(0.02));
  REQUIRE(var == Catch::Approx(1.0).margin(0.03));
}

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <doctest.h>

#include "risim/scene.hpp"

using namespace risim;

namespace {

SceneConfig reference_scene() {
  SceneConfig cfg;  // defaults mirror the benchmark setup
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("scene");

TEST_CASE("element grid is centered on the configured midpoint") {
  SceneConfig cfg = reference_scene();

  SUBCASE("single element sits exactly at the center") {
    cfg.ris_rows = 1;
    cfg.ris_cols = 1;
    cfg.ris_center = {0.3, -0.2, 0.1};
    auto pos = ris_element_positions(cfg);
    REQUIRE(pos.size() == 1);
    CHECK(pos[0].x == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(pos[0].y == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(pos[0].z == doctest::Approx(0.1).epsilon(1e-15));
  }

  SUBCASE("2x2 at spacing 0.5 gives the four (+-0.25, +-0.25) corners") {
    cfg.ris_rows = 2;
    cfg.ris_cols = 2;
    cfg.ris_element_spacing = 0.5;
    cfg.ris_center = {0, 0, 0};
    auto pos = ris_element_positions(cfg);
    REQUIRE(pos.size() == 4);
    // l = m * N + n, m along x, n along y
    CHECK(pos[0].x == doctest::Approx(-0.25));
    CHECK(pos[0].y == doctest::Approx(-0.25));
    CHECK(pos[1].x == doctest::Approx(-0.25));
    CHECK(pos[1].y == doctest::Approx(0.25));
    CHECK(pos[2].x == doctest::Approx(0.25));
    CHECK(pos[2].y == doctest::Approx(-0.25));
    CHECK(pos[3].x == doctest::Approx(0.25));
    CHECK(pos[3].y == doctest::Approx(0.25));
    for (auto& p : pos) CHECK(p.z == 0.0);
  }

  SUBCASE("centroid equals ris_center to 1e-12 for random shapes") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::uniform_int_distribution<int> count(1, 9);
    for (int trial = 0; trial < 20; ++trial) {
      cfg.ris_rows = count(rng);
      cfg.ris_cols = count(rng);
      cfg.ris_element_spacing = 0.01 + 0.1 * std::generate_canonical<double, 53>(rng);
      cfg.ris_center = {coord(rng), coord(rng), coord(rng)};
      auto pos = ris_element_positions(cfg);
      REQUIRE((int)pos.size() == cfg.ris_rows * cfg.ris_cols);
      Vec3 centroid{0, 0, 0};
      for (auto& p : pos) centroid = centroid + p;
      centroid = (1.0 / pos.size()) * centroid;
      CHECK(std::abs(centroid.x - cfg.ris_center.x) < 1e-12);
      CHECK(std::abs(centroid.y - cfg.ris_center.y) < 1e-12);
      CHECK(std::abs(centroid.z - cfg.ris_center.z) < 1e-12);
    }
  }

  SUBCASE("17x17 half-wavelength aperture spans 0.45166 m") {
    cfg.ris_rows = 17;
    cfg.ris_cols = 17;
    cfg.ris_element_spacing = 0.0;  // resolve to lambda_c / 2
    auto pos = ris_element_positions(cfg);
    double min_x = pos[0].x, max_x = pos[0].x;
    for (auto& p : pos) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
    }
    // (17 - 1) * 0.0282290450... at 5.31 GHz
    CHECK(max_x - min_x == doctest::Approx(0.4516647201506591).epsilon(1e-12));
  }
}

TEST_CASE("subcarrier frequencies sample the band symmetrically") {
  SceneConfig cfg = reference_scene();
  // f_s = f_c - B/2 + (s + 1/2) B / S
  CHECK(cfg.subcarrier_frequency(0) == doctest::Approx(5290666666.666667).epsilon(1e-12));
  CHECK(cfg.subcarrier_frequency(29) == doctest::Approx(5329333333.333333).epsilon(1e-12));
  double mean = 0;
  for (int s = 0; s < cfg.subcarrier_count; ++s) mean += cfg.subcarrier_frequency(s);
  mean /= cfg.subcarrier_count;
  CHECK(mean == doctest::Approx(cfg.center_frequency_hz).epsilon(1e-12));

  SUBCASE("a single subcarrier sits at the center frequency") {
    cfg.subcarrier_count = 1;
    CHECK(cfg.subcarrier_frequency(0) == doctest::Approx(5.31e9).epsilon(1e-15));
  }
}

TEST_CASE("path_lengths matches hand-computed distances") {
  SceneConfig cfg = reference_scene();
  cfg.grid_nx = 3;
  cfg.grid_ny = 3;
  cfg.grid_step = 0.02;
  cfg.grid_origin = {-0.02, -0.02, 0.0};
  cfg.grid_plane_z = 1.0;
  cfg.ris_rows = 2;
  cfg.ris_cols = 2;

  // center voxel: k = ix * ny + iy = 1 * 3 + 1 -> (0, 0, 1)
  int k = 4;
  Vec3 v = cfg.voxel_position(k);
  CHECK(v.x == doctest::Approx(0.0));
  CHECK(v.y == doctest::Approx(0.0));
  CHECK(v.z == doctest::Approx(1.0));

  PathGeometry g = path_lengths(cfg, k);
  // Tx (0,-1,0.5) to (0,0,1): sqrt(1 + 0.25) = sqrt(1.25)
  CHECK(g.d_tx_voxel == doctest::Approx(1.118033988749895).epsilon(1e-15));
  CHECK(g.d_voxel_rx == doctest::Approx(1.118033988749895).epsilon(1e-15));
  REQUIRE((int)g.d_tx_element.size() == 4);
  REQUIRE((int)g.d_element_voxel.size() == 4);

  // bounce path decomposes exactly into its three legs
  auto elems = ris_element_positions(cfg);
  for (int l = 0; l < 4; ++l) {
    CHECK(g.d_tx_element[l] == doctest::Approx(distance(cfg.tx_position, elems[l])).epsilon(1e-15));
    CHECK(g.d_element_voxel[l] == doctest::Approx(distance(elems[l], v)).epsilon(1e-15));
    CHECK(g.ris_total(l) == g.d_tx_element[l] + g.d_element_voxel[l] + g.d_voxel_rx);
  }

  SUBCASE("all lengths are strictly positive") {
    for (int vox = 0; vox < cfg.voxel_count(); ++vox) {
      PathGeometry pg = path_lengths(cfg, vox);
      CHECK(pg.d_tx_voxel > 0);
      CHECK(pg.d_voxel_rx > 0);
      for (int l = 0; l < cfg.element_count(); ++l) {
        CHECK(pg.d_tx_element[l] > 0);
        CHECK(pg.d_element_voxel[l] > 0);
      }
    }
  }

  SUBCASE("translating the whole scene changes nothing") {
    Vec3 offset{1.7, -2.3, 0.9};
    SceneConfig moved = cfg;
    moved.tx_position = cfg.tx_position + offset;
    moved.rx_position = cfg.rx_position + offset;
    moved.ris_center = cfg.ris_center + offset;
    moved.grid_origin = cfg.grid_origin + offset;
    moved.grid_plane_z = cfg.grid_plane_z + offset.z;
    for (int vox = 0; vox < cfg.voxel_count(); ++vox) {
      PathGeometry a = path_lengths(cfg, vox);
      PathGeometry b = path_lengths(moved, vox);
      CHECK(std::abs(a.d_tx_voxel - b.d_tx_voxel) < 1e-12);
      CHECK(std::abs(a.d_voxel_rx - b.d_voxel_rx) < 1e-12);
      for (int l = 0; l < cfg.element_count(); ++l) {
        CHECK(std::abs(a.d_tx_element[l] - b.d_tx_element[l]) < 1e-12);
        CHECK(std::abs(a.d_element_voxel[l] - b.d_element_voxel[l]) < 1e-12);
      }
    }
  }

  SUBCASE("bad voxel index throws") {
    CHECK_THROWS_AS(path_lengths(cfg, -1), std::out_of_range);
    CHECK_THROWS_AS(path_lengths(cfg, cfg.voxel_count()), std::out_of_range);
  }
}

TEST_CASE("letter rasterization") {
  SUBCASE("E at 0.50 m / 0.02 m step is the 26x26 benchmark shape") {
    ReflectivityMap e = make_letter_scene('E', 0.50, 0.02);
    REQUIRE(e.nx == 26);
    REQUIRE(e.ny == 26);
    int ones = 0;
    for (int i = 0; i < e.size(); ++i) {
      CHECK((e.values[i] == 0.0 || e.values[i] == 1.0));
      ones += e.values[i] == 1.0;
    }
    // left stem + three full-width bars, 5-cell strokes
    CHECK(ones == 445);
    // stroke width: bottom bar occupies iy in [0, 5)
    for (int ix = 0; ix < 26; ++ix) {
      for (int iy = 0; iy < 5; ++iy) CHECK(e.at(ix, iy) == 1.0);
    }
    // stem occupies ix in [0, 5) at every height
    for (int ix = 0; ix < 5; ++ix) {
      for (int iy = 0; iy < 26; ++iy) CHECK(e.at(ix, iy) == 1.0);
    }
    // interior gap between bottom and middle bar is empty away from the stem
    CHECK(e.at(12, 7) == 0.0);
    CHECK(e.at(25, 17) == 0.0);
  }

  SUBCASE("T is the top bar plus centered stem") {
    ReflectivityMap t = make_letter_scene('T', 0.50, 0.02);
    REQUIRE(t.nx == 26);
    REQUIRE(t.ny == 26);
    int ones = 0;
    for (int i = 0; i < t.size(); ++i) ones += t.values[i] == 1.0;
    CHECK(ones == 235);
    for (int ix = 0; ix < 26; ++ix) CHECK(t.at(ix, 25) == 1.0);  // top bar
    for (int iy = 0; iy < 26; ++iy) CHECK(t.at(12, iy) == 1.0);  // stem
    CHECK(t.at(0, 0) == 0.0);
    CHECK(t.at(25, 0) == 0.0);
  }

  SUBCASE("same inputs give identical maps") {
    ReflectivityMap a = make_letter_scene('E', 0.50, 0.02);
    ReflectivityMap b = make_letter_scene('E', 0.50, 0.02);
    CHECK(a.values == b.values);
  }

  SUBCASE("unsupported letter throws") {
    CHECK_THROWS_AS(make_letter_scene('Q', 0.50, 0.02), std::invalid_argument);
  }
}

TEST_CASE("point scenes place unit scatterers on the nearest cell") {
  SceneConfig cfg = reference_scene();

  SUBCASE("empty point list gives an all-zero map") {
    ReflectivityMap m = make_point_scene({}, cfg);
    CHECK(m.values.maxCoeff() == 0.0);
    CHECK(m.values.minCoeff() == 0.0);
  }

  SUBCASE("the four benchmark points land on a 22 cm square") {
    std::vector<std::array<double, 2>> pts = {
        {-0.12, -0.12}, {-0.12, 0.1}, {0.1, -0.12}, {0.1, 0.1}};
    ReflectivityMap m = make_point_scene(pts, cfg);
    CHECK(m.values.sum() == doctest::Approx(4.0));
    // index quotients land exactly on half-cells and round away from zero
    CHECK(m.at(7, 7) == 1.0);
    CHECK(m.at(7, 18) == 1.0);
    CHECK(m.at(18, 7) == 1.0);
    CHECK(m.at(18, 18) == 1.0);
    // 11 cells * 0.02 m = 0.22 m separation on both axes
  }

  SUBCASE("a point on an exact cell center stays there") {
    ReflectivityMap m = make_point_scene({{-0.25, -0.25}}, cfg);
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.values.sum() == doctest::Approx(1.0));
  }

  SUBCASE("coincident points collapse to a single occupied cell") {
    ReflectivityMap m = make_point_scene({{0.0, 0.0}, {0.001, 0.001}}, cfg);
    CHECK(m.values.sum() == doctest::Approx(1.0));
  }

  SUBCASE("out-of-grid points throw") {
    CHECK_THROWS_AS(make_point_scene({{0.9, 0.0}}, cfg), std::out_of_range);
    CHECK_THROWS_AS(make_point_scene({{0.0, -0.9}}, cfg), std::out_of_range);
  }
}

TEST_CASE("scene validation rejects malformed configs") {
  SceneConfig cfg = reference_scene();
  CHECK_NOTHROW(cfg.validate());

  SceneConfig bad = cfg;
  bad.ris_rows = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.grid_step = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.subcarrier_count = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.bandwidth_hz = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.center_frequency_hz = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_SUITE_END();

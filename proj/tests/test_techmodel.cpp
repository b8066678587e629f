#include <doctest.h>

#include <sotdtco/techmodel.hpp>

using namespace sotdtco;

TEST_CASE("cell widths and heights follow the grid") {
  TechNode t;
  auto fv = bitcell_geometry(CellConfig::FV2T1R, t);
  auto rv = bitcell_geometry(CellConfig::RV2T1R, t);
  auto d = bitcell_geometry(CellConfig::T1D1R, t);
  CHECK(fv.width_cpp == 2);
  CHECK(rv.width_cpp == 4);
  CHECK(d.width_cpp == 2);
  CHECK(rv.width_nm == doctest::Approx(4 * t.cpp));
  CHECK(d.area_um2 == doctest::Approx(2 * t.cpp * 4 * t.mp * 1e-6));
  CHECK(d.meets_sram_target);
  CHECK(fv.unrealistic);
  CHECK_FALSE(rv.unrealistic);
}

TEST_CASE("area ordering of the selector cells") {
  TechNode t;
  auto a = [&](CellConfig c) { return bitcell_geometry(c, t).area_um2; };
  CHECK(a(CellConfig::T1D1R) < a(CellConfig::T1R1T_VGA));
  CHECK(a(CellConfig::T1R1T_VGA) <= a(CellConfig::T1R1T));
  CHECK(a(CellConfig::T1R1T) < a(CellConfig::RV2T1R));
}

TEST_CASE("via aspect ratios") {
  TechNode t;
  MtjStackGeometry s;
  CHECK(s.stack_height_nm() == doctest::Approx(335));
  CHECK(via_aspect_ratio(335, 25) == doctest::Approx(13.4));
  auto r = via_report(s, t);
  REQUIRE(r.size() == 2);
  CHECK(r[0].route == "FV");
  CHECK(r[0].integration_risk);
  CHECK(r[1].aspect_ratio == doctest::Approx(2.5));
  CHECK_FALSE(r[1].integration_risk);
  CHECK_THROWS_AS(via_aspect_ratio(0, 25), Error);
}

TEST_CASE("cross-node budget counts whole tiles") {
  CHECK(cross_node_budget({"x", 56, 40, 0.021}) == 9);
  CHECK(cross_node_budget({"x", 50, 42, 0.021}) == 10);  // exactly 10 tiles
  CHECK(cross_node_budget({"x", 90, 64, 0.021}) == 3);
  CHECK_THROWS_AS(cross_node_budget({"x", 0, 40, 0.021}), Error);
}

TEST_CASE("bitline resistance scales with rows and width") {
  TechNode t;
  double r1 = bitline_resistance(CellConfig::RV2T1R, 1, t);
  CHECK(bitline_resistance(CellConfig::RV2T1R, 128, t) == doctest::Approx(128 * r1));
  CHECK(bitline_resistance(CellConfig::T1D1R, 128, t) == doctest::Approx(0.5 * bitline_resistance(CellConfig::RV2T1R, 128, t)));
  CHECK_THROWS_AS(bitline_resistance(CellConfig::RV2T1R, 0, t), Error);
}

TEST_CASE("minimax bitline constant matches a brute-force scan") {
  TechNode t;
  std::vector<BlTarget> tg = {{CellConfig::RV2T1R, 1700}, {CellConfig::T1R1T, 1400},
                              {CellConfig::T1R1T_VGA, 1400}, {CellConfig::T1D1R, 870}};
  auto worst = [&](double r) {
    TechNode u = t;
    u.bl_resistance_per_length = r;
    double w = 0;
    for (auto& b : tg) w = std::max(w, std::abs(bitline_resistance(b.config, 128, u) / b.resistance - 1));
    return w;
  };
  double fit = fit_bl_resistance_per_length(tg, 128, t);
  double best = 1e9, best_r = 0;
  for (int k = 0; k <= 200000; ++k) {
    double r = 0.05 + k * 0.02 / 200000;
    if (worst(r) < best) best = worst(r), best_r = r;
  }
  CHECK(fit == doctest::Approx(best_r).epsilon(1e-5));
  CHECK(worst(fit) <= best + 1e-9);
  CHECK(worst(fit) < 0.05);
}

TEST_CASE("config names round-trip") {
  for (auto c : kAllConfigs) CHECK(parse_config(to_string(c)) == c);
  CHECK_THROWS_AS(parse_config("3T0R"), Error);
}

TEST_CASE("tech validation") {
  TechNode t;
  t.mp = 60;
  CHECK_THROWS_AS(t.validate(), Error);
}

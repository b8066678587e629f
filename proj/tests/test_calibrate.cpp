#include <doctest.h>

#include <cmath>

#include <sotdtco/calibrate.hpp>

using namespace sotdtco;

TEST_CASE("write calibration closes on the cell currents") {
  RunConfig cfg;
  auto r = calibrate_finfet(cfg);
  CHECK(r.rows.size() == 12);
  CHECK(r.worst_rel_error < 0.03);
  CHECK(std::abs(r.ratio_1d_rv_tt - cfg.write_targets.ratio_1d_rv_tt) < 0.02);
  CHECK(std::abs(r.ratio_1t_rv_ss - cfg.write_targets.ratio_1t_rv_ss) < 0.02);
  CHECK(r.seconds < 10);
  CHECK(r.fet.vt[1] > r.fet.vt[0]);
  CHECK(r.fet.vt[0] > r.fet.vt[2]);

  // applying the fit reproduces the model values through the public write path
  apply(cfg, r);
  for (const auto& row : r.rows) {
    double i = write_current({row.config, cfg.write_targets.rows, row.corner}, cfg.tech, cfg.finfet, cfg.write);
    CHECK(i == doctest::Approx(row.model).epsilon(1e-9));
  }
}

TEST_CASE("write calibration is deterministic") {
  RunConfig cfg;
  auto a = calibrate_finfet(cfg);
  auto b = calibrate_finfet(cfg);
  CHECK(a.fet.g_ref == b.fet.g_ref);
  CHECK(a.write.r_access == b.write.r_access);
  CHECK(a.worst_rel_error == b.worst_rel_error);
}

TEST_CASE("bitline constant comes from the minimax fit") {
  RunConfig cfg;
  auto r = calibrate_finfet(cfg);
  double k = fit_bl_resistance_per_length(cfg.write_targets.bl, cfg.write_targets.rows, cfg.tech);
  CHECK(r.bl_resistance_per_length == k);
}

TEST_CASE("missing targets are rejected") {
  RunConfig cfg;
  cfg.write_targets.i_cell.clear();
  CHECK_THROWS_AS(calibrate_finfet(cfg), Error);
}

TEST_CASE("line capacitance solve hits a latency target") {
  RunConfig cfg;
  const auto& p = cfg.read_points.at(0);
  ReadCase rc;
  rc.config = p.config;
  rc.selector = p.selector;
  rc.ra = p.ra;
  rc.tmr = p.tmr;
  rc.v_read = p.v_read;
  auto f = calibrate_line_cap(cfg, rc, 100e-12);
  CHECK(f.latency == doctest::Approx(100e-12).epsilon(0.01));
  cfg.read.line_cap_per_cell = f.line_cap_per_cell;
  auto s = sense(rc, cfg.tech, cfg.finfet, cfg.read);
  REQUIRE(s.latency);
  CHECK(*s.latency == doctest::Approx(100e-12).epsilon(0.01));
}

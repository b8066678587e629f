#include <doctest.h>

#include <cmath>

#include <sotdtco/arraysim.hpp>
#include <sotdtco/config.hpp>

using namespace sotdtco;

namespace {

double rel(double a, double b) { return std::abs(a / b - 1.0); }

// Farthest-cell write current from a scalar bisection on the drain voltage.
double write_oracle(const RunConfig& cfg, CellConfig c, int rows, Corner k) {
  const auto i = index_of(c);
  FinFetModel m = cfg.finfet;
  m.nf = cfg.write.nf[i];
  m.nfin = cfg.write.nfin[i];
  double r = bitline_resistance(c, rows, cfg.tech) + cfg.write.r_sot + cfg.write.r_access[i];
  double vg = cfg.write.v_write + cfg.write.gate_overdrive;
  double lo = 0, hi = cfg.write.v_write;
  for (int n = 0; n < 200; ++n) {
    double vd = 0.5 * (lo + hi);
    if (vd + r * finfet_current(m, vg, vd, k) > cfg.write.v_write) hi = vd;
    else lo = vd;
  }
  return finfet_current(m, vg, 0.5 * (lo + hi), k);
}

ReadCase point(const ReadPoint& p, int rows = 128) {
  ReadCase rc;
  rc.config = p.config;
  rc.selector = p.selector;
  rc.rows = rc.cols = rows;
  rc.ra = p.ra;
  rc.tmr = p.tmr;
  rc.v_read = p.v_read;
  rc.vt_shift = p.vt_shift;
  return rc;
}

}  // namespace

TEST_CASE("write current matches the scalar oracle") {
  RunConfig cfg;
  for (auto c : kAllConfigs)
    for (int k = 0; k < 3; ++k)
      for (int rows : {1, 64, 256}) {
        double a = write_current({c, rows, static_cast<Corner>(k)}, cfg.tech, cfg.finfet, cfg.write);
        double b = write_oracle(cfg, c, rows, static_cast<Corner>(k));
        CHECK(rel(a, b) < 1e-6);
      }
}

TEST_CASE("write current near the reference cell value and falls with rows") {
  RunConfig cfg;
  double i = write_current({CellConfig::RV2T1R, 128, Corner::tt}, cfg.tech, cfg.finfet, cfg.write);
  CHECK(rel(i, 124e-6) < 0.05);
  double prev = 1;
  for (int rows : {1, 16, 64, 128, 256, 512}) {
    double x = write_current({CellConfig::T1D1R, rows, Corner::ss}, cfg.tech, cfg.finfet, cfg.write);
    CHECK(x < prev);
    prev = x;
  }
  double ss = write_current({CellConfig::RV2T1R, 128, Corner::ss}, cfg.tech, cfg.finfet, cfg.write);
  double ff = write_current({CellConfig::RV2T1R, 128, Corner::ff}, cfg.tech, cfg.finfet, cfg.write);
  CHECK(ss < i);
  CHECK(i < ff);
}

TEST_CASE("write feasibility flags follow the critical current") {
  RunConfig cfg;
  auto f = write_feasibility({CellConfig::RV2T1R, 128, Corner::tt}, cfg.tech, cfg.finfet, cfg.write, cfg.stack,
                             {10.0, 200.0});
  REQUIRE(f.meets.size() == 2);
  CHECK(f.meets[0].second);
  CHECK_FALSE(f.meets[1].second);
}

TEST_CASE("reference 2T1R read point") {
  RunConfig cfg;
  const auto& p = cfg.read_points.at(0);
  auto r = sense(point(p), cfg.tech, cfg.finfet, cfg.read);
  CHECK(r.feasible);
  CHECK(r.sm_max >= 0.1);
  CHECK(rel(r.i_dchg, p.ref_i_dchg) < 0.15);
  CHECK(rel(r.ratio, p.ref_ratio) < 0.3);
  CHECK(r.energy_error < 1e-3);
}

TEST_CASE("energy components close against the supply") {
  RunConfig cfg;
  for (const auto& p : cfg.read_points) {
    auto r = sense(point(p), cfg.tech, cfg.finfet, cfg.read);
    double sum = r.energy.column_overhead + r.energy.selector + r.energy.rest;
    CHECK(rel(sum, r.energy.total()) < 1e-12);
    CHECK(rel(r.energy.total(), r.supply_energy) < 5e-3);
    CHECK(r.energy.selector > 0);
    CHECK(r.energy.rest > 0);
  }
}

TEST_CASE("lumped and unrolled columns agree on 8 rows") {
  RunConfig cfg;
  cfg.read.window = 1e-9;
  cfg.read.dt_out = 0.05e-12;
  for (const auto& p : cfg.read_points) {
    ReadCase rc = point(p, 8);
    auto a = sense(rc, cfg.tech, cfg.finfet, cfg.read);
    rc.topology = Topology::unrolled;
    auto b = sense(rc, cfg.tech, cfg.finfet, cfg.read);
    INFO(p.name);
    CHECK(rel(a.sm_max, b.sm_max) < 0.01);
    if (a.latency && b.latency) CHECK(rel(*a.latency, *b.latency) < 0.01);
  }
}

TEST_CASE("single row has no sneak current") {
  RunConfig cfg;
  for (const auto& p : cfg.read_points) {
    ReadCase rc = point(p, 1);
    auto b = build_read_array(rc, MtjState::P, cfg.tech, cfg.finfet, cfg.read);
    CHECK(b.sneak_elements.empty());
    CHECK(b.sneak_dissipators.empty());
    auto r = sense(rc, cfg.tech, cfg.finfet, cfg.read);
    CHECK(r.sigma_i_sneak == 0.0);
    double dv = rc.v_read - r.v_rl_p;
    double line = r.energy.column_overhead - 0.5 * b.c_total * dv * dv;
    CHECK(line >= 0);
    CHECK(line < 0.05 * r.energy.total());
  }
}

TEST_CASE("sneak current direction") {
  RunConfig cfg;
  // unselected FET cells leak from the line
  auto r = sense(point(cfg.read_points.at(0)), cfg.tech, cfg.finfet, cfg.read);
  CHECK(r.sigma_i_sneak > 0);
  // inhibited diode rows see the line fall below their wordline and source current into it
  auto d = sense(point(cfg.read_points.at(3)), cfg.tech, cfg.finfet, cfg.read);
  CHECK(d.sigma_i_sneak < 0);
}

TEST_CASE("zero TMR gives no margin") {
  RunConfig cfg;
  ReadCase rc = point(cfg.read_points.at(0));
  rc.tmr = 0;
  auto r = sense(rc, cfg.tech, cfg.finfet, cfg.read);
  CHECK_FALSE(r.feasible);
  CHECK(r.sm_max < 1e-6);
}

TEST_CASE("sensing is deterministic") {
  RunConfig cfg;
  ReadCase rc = point(cfg.read_points.at(4));
  auto a = sense(rc, cfg.tech, cfg.finfet, cfg.read);
  auto b = sense(rc, cfg.tech, cfg.finfet, cfg.read);
  CHECK(a.sm_max == b.sm_max);
  CHECK(a.latency == b.latency);
  CHECK(a.energy.total() == b.energy.total());
}

TEST_CASE("invalid read inputs") {
  RunConfig cfg;
  ReadCase rc;
  rc.rows = 0;
  CHECK_THROWS_AS(sense(rc, cfg.tech, cfg.finfet, cfg.read), Error);
  rc.rows = 4;
  rc.v_read = -1;
  CHECK_THROWS_AS(sense(rc, cfg.tech, cfg.finfet, cfg.read), Error);
}

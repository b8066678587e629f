#include <doctest.h>

#include <sotdtco/calibrate.hpp>
#include <sotdtco/explorer.hpp>

using namespace sotdtco;

namespace {

SweepGrid small_grid() {
  SweepGrid g;
  g.cells = {{CellConfig::RV2T1R, Selector::finfet}, {CellConfig::T1D1R, Selector::schottky}};
  g.ra = {20, 100};
  g.tmr = {150};
  g.v_read = {0.7, 1.6};
  g.vt_shift = {0.0, 0.1};
  g.rows = {16};
  return g;
}

}  // namespace

TEST_CASE("grid expansion drops duplicate threshold shifts for non-IGZO cells") {
  auto g = small_grid();
  CHECK(g.size() == 16);
  CHECK(g.cases().size() == 8);
  g.cells.push_back({CellConfig::T1R1T, Selector::igzo});
  CHECK(g.cases().size() == 16);
  g.max_points = 10;
  CHECK_THROWS_AS(g.validate(), Error);
  g.max_points = 100;
  g.ra.clear();
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("sweep results do not depend on the worker count") {
  RunConfig cfg;
  auto g = small_grid();
  auto a = read_design_space(cfg, g, 1);
  auto b = read_design_space(cfg, g, 2);
  REQUIRE(a.size() == b.size());
  CHECK(a.size() == g.cases().size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].report.sm_max == b[i].report.sm_max);
    CHECK(a[i].report.energy.total() == b[i].report.energy.total());
    CHECK(a[i].min_vread_of_group == b[i].min_vread_of_group);
  }
}

TEST_CASE("one minimum read voltage per feasible group") {
  RunConfig cfg;
  auto recs = read_design_space(cfg, small_grid(), 1);
  std::map<decltype(read_group_key(ReadCase{})), int> marks;
  for (const auto& r : recs) {
    if (!r.min_vread_of_group) continue;
    CHECK(r.report.feasible);
    ++marks[read_group_key(r.rc)];
    for (const auto& o : recs)
      if (read_group_key(o.rc) == read_group_key(r.rc) && o.report.feasible) CHECK(o.rc.v_read >= r.rc.v_read);
  }
  for (auto& [k, n] : marks) CHECK(n == 1);
}

TEST_CASE("read voltage grid") {
  auto g = vread_grid(0.5, 2.5, 0.1);
  CHECK(g.size() == 21);
  CHECK(g.front() == 0.5);
  CHECK(g.back() == 2.5);
  CHECK(g[3] == 0.8);
  CHECK_THROWS_AS(vread_grid(1, 0, 0.1), Error);
}

TEST_CASE("writability crossover comes out of the write solver") {
  RunConfig cfg;
  apply(cfg, calibrate_finfet(cfg));
  auto m = writability_vs_rows(cfg, {CellConfig::RV2T1R, CellConfig::T1D1R}, {16, 32, 64, 128, 256},
                               retention_deltas(cfg), Corner::ss);
  CHECK(m.size() == 10);
  auto last = last_rows_where_exceeds(m, CellConfig::RV2T1R, CellConfig::T1D1R);
  REQUIRE(last);
  CHECK(*last == 64);
  for (const auto& x : m) {
    CHECK(x.meets.size() == cfg.retention.targets_s.size());
    CHECK(x.max_delta > 0);
  }
}

TEST_CASE("ppa summary joins area, write and read") {
  RunConfig cfg;
  auto pp = ppa_summary(cfg, {cfg.read_points[0], cfg.read_points[3]}, 128, 2);
  REQUIRE(pp.size() == 2);
  CHECK(pp[0].area_um2 == doctest::Approx(bitcell_geometry(CellConfig::RV2T1R, cfg.tech).area_um2));
  CHECK(pp[1].area_um2 < pp[0].area_um2);
  CHECK(pp[1].area_um2 <= cfg.tech.sram_target_um2);
  CHECK(pp[0].i_cell[1] < pp[0].i_cell[0]);
  CHECK(pp[0].retention_s > 0);
  CHECK(pp[0].read.feasible);
}

TEST_CASE("worker errors propagate") {
  CHECK_THROWS_AS(parallel_for(8, 3,
                               [](std::size_t i) {
                                 if (i == 5) throw Error("x", "boom");
                               }),
                  Error);
}

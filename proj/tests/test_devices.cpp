#include <doctest.h>

#include <sotdtco/config.hpp>
#include <sotdtco/devices.hpp>

using namespace sotdtco;

namespace {

double bisect(const std::function<double(double)>& g, double a, double b) {
  double ga = g(a);
  for (int k = 0; k < 200; ++k) {
    double m = 0.5 * (a + b), gm = g(m);
    if ((gm > 0) == (ga > 0)) a = m, ga = gm;
    else b = m;
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("tunnel diode is odd to machine precision") {
  RunConfig c;
  for (double v = -2.5; v <= 2.5; v += 0.01237) CHECK(diode_current(c.read.tunnel, -v) == -diode_current(c.read.tunnel, v));
}

TEST_CASE("schottky diode rectifies over the read range") {
  RunConfig c;
  for (double v = 0.2; v <= 2.0; v += 0.05) {
    double f = diode_current(c.read.schottky, v), r = diode_current(c.read.schottky, -v);
    CHECK(std::abs(f / r) > 1);
  }
}

TEST_CASE("tunnel chord resistance falls with bias") {
  RunConfig c;
  double prev = INFINITY;
  for (double v = 0.05; v <= 2.0; v += 0.05) {
    double r = secant_resistance(v, diode_current(c.read.tunnel, v)).ohms;
    CHECK(r < prev);
    prev = r;
  }
  CHECK(secant_resistance(1.0, 0.0).divergent);
}

TEST_CASE("diode with series resistor matches scalar bisection") {
  DiodeModel d{DiodeKind::schottky_asymmetric, 1e-14, 0.03, 1.0, 20e3, 1e-8};
  for (double v : {-1.5, -0.3, 0.1, 0.4, 0.8, 1.6}) {
    double i = diode_current(d, v);
    double ref = bisect([&](double x) { return x - diode_intrinsic(d, v - x * d.r_series); }, std::min(0.0, v / d.r_series),
                        std::max(0.0, v / d.r_series));
    CHECK(std::abs(i - ref) <= 1e-9 * std::max(1.0, std::abs(ref)) + 1e-18);
  }
}

TEST_CASE("finfet current is monotone in gate and drain") {
  RunConfig c;
  FinFetModel m = c.finfet;
  for (auto k : {Corner::tt, Corner::ss, Corner::ff}) {
    for (double vd = 0; vd <= 1.0; vd += 0.05) {
      double prev = -1;
      for (double vg = 0; vg <= 1.0; vg += 0.02) {
        double i = finfet_current(m, vg, vd, k);
        CHECK(i >= prev);
        prev = i;
      }
    }
    for (double vg = 0; vg <= 1.0; vg += 0.1) {
      double prev = -1;
      for (double vd = 0; vd <= 1.0; vd += 0.02) {
        double i = finfet_current(m, vg, vd, k);
        CHECK(i >= prev);
        prev = i;
      }
    }
  }
  CHECK(finfet_current(m, 0.8, 0.5, Corner::ss) < finfet_current(m, 0.8, 0.5, Corner::tt));
  CHECK(finfet_current(m, 0.8, 0.5, Corner::tt) < finfet_current(m, 0.8, 0.5, Corner::ff));
}

TEST_CASE("finfet corner order is enforced") {
  FinFetModel m;
  m.vt = {0.3, 0.2, 0.4};
  CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("igzo current: monotone in gate, odd under terminal swap, capped") {
  RunConfig c;
  IgzoFetModel m = c.read.igzo;
  double prev = -1;
  for (double vg = -1; vg <= 3; vg += 0.05) {
    double i = igzo_current(m, vg, 0.5);
    CHECK(i >= prev);
    prev = i;
  }
  CHECK(igzo_current(m, 1.0, 0.0) == 0.0);
  // swapping drain and source flips the sign
  double a = igzo_current(m, 1.2, 0.4);
  double b = igzo_current(m, 1.2 - 0.4, -0.4);
  CHECK(b == doctest::Approx(-a).epsilon(1e-12));
  CHECK(igzo_current(m, 10, 3) <= m.i_on_per_um * m.width_um * (1 + 1e-12));
  CHECK(igzo_current(m.shifted(0.12), 0, 1) < igzo_current(m, 0, 1));
}

TEST_CASE("mtj resistances and dilution") {
  MtjModel m{20, 86, 63, MtjState::P};
  double area = phys::pi * 0.0315 * 0.0315;
  CHECK(mtj_resistance(m) == doctest::Approx(20 / area));
  m.state = MtjState::AP;
  CHECK(mtj_resistance(m) == doctest::Approx(20 / area * 1.86));
  CHECK(effective_tmr(1000, 100, 0) == doctest::Approx(100));
  CHECK(effective_tmr(1000, 100, 1000) == doctest::Approx(50));
  CHECK_THROWS_AS(effective_tmr(1000, 100, -1), Error);
}

TEST_CASE("device continuity near the origin") {
  RunConfig c;
  for (const auto* d : {&c.read.tunnel, &c.read.schottky}) {
    double h = 1e-7;
    CHECK(std::abs(diode_current(*d, h) - diode_current(*d, -h)) < 1e-9);
  }
}

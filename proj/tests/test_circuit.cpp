#include <doctest.h>

#include <cmath>

#include <sotdtco/circuit.hpp>
#include <sotdtco/devices.hpp>

using namespace sotdtco;

namespace {

// RC discharge: 1 V on C through R to ground.
struct Rc {
  Circuit c;
  int n;
  double r = 10e3, cap = 100e-15;
  Rc() {
    n = c.add_node("x");
    c.resistor(n, 0, r, "r");
    c.capacitor(n, 0, cap, "c");
  }
};

double bisect_diode(const DiodeModel& d, double vs, double r) {
  // vs = v_d + r * i(v_d)
  double lo = 0, hi = vs;
  for (int k = 0; k < 200; ++k) {
    double m = 0.5 * (lo + hi);
    if (m + r * diode_current(d, m) > vs) hi = m;
    else lo = m;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("rc discharge matches the exponential at t = RC") {
  Rc rc;
  double tau = rc.r * rc.cap;
  TransientOptions o;
  o.t_stop = 2 * tau;
  o.dt_out = tau / 50;
  std::vector<double> v0(rc.c.node_count(), 0.0);
  v0[rc.n] = 1.0;
  auto tr = transient(rc.c, v0, o);
  double v = TransientResult::interp(tr.t, tr.node_trace(rc.n), tau);
  CHECK(std::abs(v - std::exp(-1.0)) / std::exp(-1.0) < 5e-3);
  CHECK(tr.energy_error < 1e-3);
}

TEST_CASE("halving the step cap moves the answer by less than 0.2%") {
  Rc rc;
  double tau = rc.r * rc.cap;
  std::vector<double> v0(rc.c.node_count(), 0.0);
  v0[rc.n] = 1.0;
  auto run = [&](double dv) {
    TransientOptions o;
    o.t_stop = tau;
    o.dt_out = tau / 20;
    o.dv_max = dv;
    auto tr = transient(rc.c, v0, o);
    return tr.v.back()[rc.n];
  };
  double a = run(2e-3), b = run(1e-3);
  CHECK(std::abs(a - b) / b < 2e-3);
}

TEST_CASE("energy balance on a driven rc with a diode") {
  Circuit c;
  int in = c.add_node("in"), x = c.add_node("x");
  c.vsource(in, 0, [](double t) { return t < 0.2e-9 ? 0.0 : 1.0; }, "vin");
  DiodeModel d{DiodeKind::schottky_asymmetric, 1e-14, 0.03, 1.0, 0.0, 1e-8};
  c.two_terminal(in, x, [d](double v) { return diode_current(d, v); }, "d");
  c.resistor(x, 0, 50e3, "r");
  c.capacitor(x, 0, 20e-15, "c");
  TransientOptions o;
  o.t_stop = 3e-9;
  o.dt_out = 10e-12;
  auto tr = transient(c, std::vector<double>(c.node_count(), 0.0), o);
  CHECK(tr.energy_error < 1e-3);
  // settles one diode drop below the step, divided against the load
  CHECK(tr.v.back()[x] > 0.3);
  CHECK(tr.v.back()[x] < 1.0);
}

TEST_CASE("diode with series resistor agrees with scalar bisection") {
  DiodeModel d{DiodeKind::schottky_asymmetric, 1e-14, 0.03, 1.0, 0.0, 1e-8};
  for (double vs : {0.3, 0.8, 1.5}) {
    Circuit c;
    int a = c.add_node("a"), k = c.add_node("k");
    c.vsource(a, 0, vs, "v");
    c.two_terminal(a, k, [d](double v) { return diode_current(d, v); }, "d");
    c.resistor(k, 0, 20e3, "r");
    NewtonOptions no;
    no.vtol = 1e-13;
    no.abstol_i = 1e-16;
    auto r = solve_dc(c, {}, no);
    double vd = bisect_diode(d, vs, 20e3);
    CHECK(std::abs((r.v[a] - r.v[k]) - vd) < 1e-9);
  }
}

TEST_CASE("linear network converges in one newton step") {
  Circuit c;
  int a = c.add_node("a"), m = c.add_node("m");
  c.vsource(a, 0, 1.2, "v");
  c.resistor(a, m, 1e3);
  c.resistor(m, 0, 3e3);
  NewtonOptions no;
  no.max_step_v = 10;
  auto r = solve_dc(c, {}, no);
  CHECK(r.v[m] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(r.iterations <= 2);
  CHECK(r.i_src[0] == doctest::Approx(-0.3e-3).epsilon(1e-9));
}

TEST_CASE("solver failures are reported with a code") {
  Circuit c;
  int a = c.add_node("a");
  c.vsource(a, 0, 1.0, "v");
  c.two_terminal(a, 0, [](double v) { return std::signbit(v) ? 0.0 : std::nan(""); }, "bad");
  try {
    solve_dc(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.code()) == "dc_nonconvergence");
  }

  Circuit f;
  int x = f.add_node("x");
  f.capacitor(x, 0, 1e-15);
  f.two_terminal(x, 0, [](double v) { return 1e-6 * std::sinh(v / 0.1); });
  TransientOptions o;
  o.t_stop = 1e-9;
  o.dt_out = 1e-10;
  o.dv_max = 1e-12;
  o.max_halvings = 3;
  std::vector<double> v0(f.node_count(), 0.0);
  v0[x] = 1.0;
  CHECK_THROWS_WITH_AS(transient(f, v0, o), doctest::Contains("underflow"), Error);
}

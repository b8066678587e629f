#include <doctest.h>

#include <random>

#include <sotdtco/magnetics.hpp>

using namespace sotdtco;

namespace {

// long-double reference for the retention conversion
long double ref_delta(long double tau_ret, long double f, long double tau0) {
  return -std::log(-(tau0 / tau_ret) * std::log(1.0L - f));
}

// thermal-form critical current, evaluated independently in long double
long double ref_ic(long double tau, long double w_nm, long double d_nm, long double theta, long double dmtj_nm,
                   long double bx, long double bk, long double delta, long double tau_d_ns, long double temp) {
  const long double e = 1.602176634e-19L, hbar = 1.054571817e-34L, kb = 1.380649e-23L;
  const long double pi = 3.141592653589793238462643383279502884L;
  long double w = w_nm * 1e-9L, d = d_nm * 1e-9L, D = dmtj_nm * 1e-9L;
  long double x = pi * tau_d_ns * 1e-9L / tau;
  return 8 * e * kb * temp * w * d * delta / (pi * hbar * theta * D * D) * (1 - std::sqrt(2.0L) * bx / bk) *
         std::sqrt(1 + x * x);
}

}  // namespace

TEST_CASE("retention conversion against a long-double reference") {
  for (double tr : {0.1, 1.0, 10.0, 100.0, 10 * kSecondsPerYear}) {
    auto d = delta_from_retention({tr, 1e-6, 1e-9, 353, 298});
    long double r = ref_delta(tr, 1e-6L, 1e-9L);
    CHECK(d.at_t_op == doctest::Approx(static_cast<double>(r)).epsilon(1e-12));
    CHECK(d.renormalized == doctest::Approx(static_cast<double>(r * 353 / 298)).epsilon(1e-12));
  }
}

TEST_CASE("retention and delta invert each other") {
  for (double tr : {0.05, 3.0, 1e4, 1e9}) {
    auto d = delta_from_retention({tr, 1e-6, 1e-9, 353, 298});
    CHECK(retention_from_delta(d.at_t_op, 1e-6, 1e-9) == doctest::Approx(tr).epsilon(1e-10));
  }
}

TEST_CASE("retention domain errors") {
  CHECK_THROWS_AS(delta_from_retention({1e-10, 1e-6, 1e-9, 353, 298}), Error);
  CHECK_THROWS_AS(delta_from_retention({1.0, 0.0, 1e-9, 353, 298}), Error);
  CHECK_THROWS_AS(delta_from_retention({1.0, 1e-6, 1e-9, -1, 298}), Error);
}

TEST_CASE("material and thermal forms agree when M_s comes from delta") {
  std::mt19937_64 rng(20261019);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int k = 0; k < 10000; ++k) {
    MtjStack s;
    s.d_mtj = 20 + 80 * u(rng);
    s.delta = 20 + 60 * u(rng);
    s.w_sot = s.d_mtj + 5 + 60 * u(rng);
    s.d_sot = 2 + 6 * u(rng);
    s.b_k = 50 + 400 * u(rng);
    s.b_x = s.b_k * 0.6 * u(rng) + 1e-3;
    s.d_fl = 0.5 + 2 * u(rng);
    s.theta_sh = 0.05 + 0.5 * u(rng);
    s.tau_d = 0.2 + 3 * u(rng);
    double tau = 1e-10 * std::pow(1e3, u(rng));
    double temp = 250 + 150 * u(rng);
    s.m_s = m_s_from_delta(s.delta, s.b_k, s.d_fl, s.d_mtj, temp);
    double a = critical_current(tau, s, temp, IcForm::material);
    double b = critical_current(tau, s, temp, IcForm::thermal);
    worst = std::max(worst, std::abs(a - b) / std::abs(b));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("stack delta round trip") {
  double ms = m_s_from_delta(40, 219, 1, 63, 298);
  CHECK(delta_from_stack(219, ms, 1, 63, 298) == doctest::Approx(40).epsilon(1e-14));
}

TEST_CASE("critical current against the reference at the write operating point") {
  MtjStack s;
  s.w_sot = 73;
  s.theta_sh = 0.3;
  for (double d : {38.2, 41.0, 43.7, 46.4}) {
    s.delta = d;
    double ic = critical_current(10e-9, s, 298, IcForm::thermal);
    long double ref = ref_ic(10e-9L, 73, 3.5, 0.3, 63, 25, 219, d, s.tau_d, 298);
    CHECK(ic == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
    CHECK(ic > 115e-6);
    CHECK(ic < 160e-6);
  }
}

TEST_CASE("pulse factor approaches one for long pulses") {
  CHECK(pulse_factor(1.0, 1.2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pulse_factor(1.2e-9, 1.2) == doctest::Approx(std::sqrt(1 + phys::pi * phys::pi)));
}

TEST_CASE("max delta is linear in available current") {
  MtjStack s;
  double a = max_delta_for_current(100e-6, 10e-9, s, 298);
  double b = max_delta_for_current(200e-6, 10e-9, s, 298);
  CHECK(b == doctest::Approx(2 * a));
  s.delta = a;
  CHECK(critical_current(10e-9, s, 298, IcForm::thermal) == doctest::Approx(100e-6));
}

TEST_CASE("ic curve layout and ordering") {
  MtjStack s;
  auto rows = ic_curve({1, 5, 10}, {40, 50}, s, 298);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].ic_uA > rows[2].ic_uA);
  CHECK(rows[3].ic_uA > rows[0].ic_uA);
  CHECK_THROWS_AS(ic_curve({5, 1}, {40}, s, 298), Error);
}

TEST_CASE("stack validation") {
  MtjStack s;
  s.b_x = 300;
  CHECK_THROWS_AS(s.validate(), Error);
  MtjStack t;
  t.m_s = 1e6;
  CHECK_THROWS_AS(t.validate(), Error);
}

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/math/tools/roots.hpp>

#include "constants.hpp"
#include "error.hpp"

namespace sotdtco {

enum class Corner { tt = 0, ss = 1, ff = 2 };

inline std::string_view to_string(Corner c) {
  switch (c) {
    case Corner::tt: return "tt";
    case Corner::ss: return "ss";
    case Corner::ff: return "ff";
  }
  return "?";
}

inline Corner parse_corner(std::string_view s) {
  if (s == "tt") return Corner::tt;
  if (s == "ss") return Corner::ss;
  if (s == "ff") return Corner::ff;
  throw Error("unknown_corner", "unknown corner '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// FinFET surrogate

/** \brief Per-fin drive that saturates smoothly in v_ds.
 *
 *  i = isat(vgs) * tanh(vds * g(vgs) / isat(vgs)) with
 *  isat = isat_ref * ov^2, g = g_ref * ov and ov = (vgs - vt)+ / (v_gref - vt_tt).
 *  isat_ref / g_ref are the typical-corner values at v_gs = v_gref.
 */
struct FinFetModel {
  double isat_ref = 1e-3;   // A per fin
  double g_ref = 6.8325e-5;  // S per fin
  double v_gref = 0.8;      // V
  std::array<double, 3> vt = {0.30, 0.39421, 0.18488};  // tt, ss, ff
  int nf = 1;
  int nfin = 1;

  int fins() const { return nf * nfin; }
  double vt_of(Corner c) const { return vt[static_cast<int>(c)]; }
  double overdrive_scale(double vgs, Corner c) const {
    return std::max(vgs - vt_of(c), 0.0) / (v_gref - vt[0]);
  }
  double i_sat_per_fin(Corner c) const {
    double ov = overdrive_scale(v_gref, c);
    return isat_ref * ov * ov;
  }
  double g_lin_per_fin(Corner c) const { return g_ref * overdrive_scale(v_gref, c); }

  void validate() const {
    require(isat_ref > 0 && g_ref > 0, "invalid_finfet", "finfet: drives must be positive");
    require(nf >= 1 && nfin >= 1, "invalid_finfet", "finfet: nf, nfin must be >= 1");
    require(v_gref > vt[0], "invalid_finfet", "finfet: reference gate must exceed vt_tt");
    require(vt[1] > vt[0] && vt[0] > vt[2], "invalid_finfet",
            "finfet: need vt_ss > vt_tt > vt_ff so that isat(ss) < isat(tt) < isat(ff)");
  }
};

inline double finfet_fin_current(const FinFetModel& m, double vgs, double vds, Corner c) {
  if (vds < 0) return -finfet_fin_current(m, vgs - vds, -vds, c);
  double ov = m.overdrive_scale(vgs, c);
  if (ov <= 0) return 0.0;
  double isat = m.isat_ref * ov * ov;
  double g = m.g_ref * ov;
  return isat * std::tanh(vds * g / isat);
}

/// Drain-to-source current of the whole device (nf x nfin fins).
inline double finfet_current(const FinFetModel& m, double vgs, double vds, Corner c) {
  return m.fins() * finfet_fin_current(m, vgs, vds, c);
}

// ---------------------------------------------------------------------------
// IGZO FET

/** \brief Charge-based (EKV-like) thin-film transistor with a soft drive cap.
 *
 *  raw = W * ispec * [F(vgs - vt_eff) - F(vgs - vds - vt_eff)],
 *  F(u) = ln^2(1 + exp(u / 2 n vT)) with n vT = ss / ln 10,
 *  vt_eff = vt_lin - dibl * vds. The drive is capped by i_on_per_um * W.
 */
struct IgzoFetModel {
  double vt_lin = -0.06;        // V
  double ss = 0.05;             // V/decade
  double ispec_per_um = 9.12e-9; // A/um
  double i_on_per_um = 2.4819e-5; // A/um, saturation cap
  double width_um = 0.1;
  double channel_length_nm = 25.0;
  double smoothing = 2.0;       // cap sharpness exponent
  double dibl = 0.0770578;      // V/V

  void validate() const {
    require(ss > 0 && ispec_per_um > 0 && i_on_per_um > 0 && width_um > 0, "invalid_igzo",
            "igzo: ss, ispec, i_on and width must be positive");
    require(smoothing >= 1, "invalid_igzo", "igzo: smoothing must be >= 1");
    require(dibl >= 0 && dibl < 1, "invalid_igzo", "igzo: dibl must be in [0,1)");
  }
  IgzoFetModel shifted(double dvt) const {
    IgzoFetModel s = *this;
    s.vt_lin += dvt;
    return s;
  }
};

namespace detail {
inline double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
}  // namespace detail

inline double igzo_current(const IgzoFetModel& m, double vgs, double vds) {
  if (vds < 0) return -igzo_current(m, vgs - vds, -vds);
  const double two_nvt = 2 * m.ss / std::log(10.0);
  const double vt = m.vt_lin - m.dibl * vds;
  double a = detail::softplus((vgs - vt) / two_nvt);
  double b = detail::softplus((vgs - vds - vt) / two_nvt);
  double raw = m.width_um * m.ispec_per_um * (a * a - b * b);
  double cap = m.width_um * m.i_on_per_um;
  double q = std::pow(raw / cap, m.smoothing);
  return raw / std::pow(1 + q, 1 / m.smoothing);
}

// ---------------------------------------------------------------------------
// Diodes

enum class DiodeKind { tunnel_symmetric, schottky_asymmetric };

/** \brief Two-exponential diode with optional ohmic perimeter leak.
 *
 *  v > 0 is the selecting (forward) direction.
 *  tunnel:   i = 2 i0 sinh(v / v0_fwd)
 *  schottky: i = i0 (expm1(v / v0_fwd) - expm1(-v / v0_rev)) + g_leak v
 */
struct DiodeModel {
  DiodeKind kind = DiodeKind::tunnel_symmetric;
  double i_0 = 1e-9;
  double v_0_fwd = 0.2;
  double v_0_rev = 0.2;
  double r_series = 0.0;
  double perimeter_leak_g = 0.0;

  void validate() const {
    require(i_0 > 0 && v_0_fwd > 0 && v_0_rev > 0, "invalid_diode", "diode: i_0, v_0 must be positive");
    require(r_series >= 0 && perimeter_leak_g >= 0, "invalid_diode", "diode: r_series, leak must be >= 0");
    if (kind == DiodeKind::schottky_asymmetric)
      require(v_0_rev > v_0_fwd, "invalid_diode", "schottky: reverse slope must be softer than forward");
  }
};

inline double diode_intrinsic(const DiodeModel& d, double v) {
  if (d.kind == DiodeKind::tunnel_symmetric) return 2 * d.i_0 * std::sinh(v / d.v_0_fwd);
  return d.i_0 * (std::expm1(v / d.v_0_fwd) - std::expm1(-v / d.v_0_rev)) + d.perimeter_leak_g * v;
}

/// Solves i = f(v - i r_series) for a monotone element f by bracketing.
template <class F>
double series_resistor_solve(F&& f, double v, double r) {
  if (r <= 0 || v == 0) return f(v);
  double hi = v / r;  // all voltage across the resistor
  double a = std::min(0.0, hi), b = std::max(0.0, hi);
  auto g = [&](double i) { return i - f(v - i * r); };
  double ga = g(a), gb = g(b);
  if (ga == 0) return a;
  if (gb == 0) return b;
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto r2 = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, iters);
  return 0.5 * (r2.first + r2.second);
}

inline double diode_current(const DiodeModel& d, double v) {
  return series_resistor_solve([&](double x) { return diode_intrinsic(d, x); }, v, d.r_series);
}

// ---------------------------------------------------------------------------
// MTJ, SOT

enum class MtjState { P, AP };

struct MtjModel {
  double ra = 11.0;      // ohm um^2
  double tmr = 86.0;     // percent
  double d_mtj = 63.0;   // nm
  MtjState state = MtjState::P;

  double area_um2() const {
    double r = 0.5 * d_mtj * 1e-3;
    return phys::pi * r * r;
  }
  double r_p() const { return ra / area_um2(); }
  double r_ap() const { return r_p() * (1 + tmr / 100); }
  void validate() const {
    require(ra > 0 && d_mtj > 0 && tmr >= 0, "invalid_mtj", "mtj: ra, d_mtj must be positive, tmr >= 0");
  }
};

inline double mtj_resistance(const MtjModel& m) {
  m.validate();
  return m.state == MtjState::P ? m.r_p() : m.r_ap();
}

struct SotTrack {
  double resistance = 660.0;  // ohm
};

inline double effective_tmr(double r_p, double tmr, double r_sel) {
  require(r_p > 0 && r_sel >= 0, "domain", "effective_tmr: resistances must be non-negative");
  return tmr * r_p / (r_p + r_sel);
}

/// Chord resistance V/I at a large-signal bias point.
struct SelectorResistance {
  double ohms;
  bool divergent;
};

inline SelectorResistance secant_resistance(double v, double i) {
  if (i == 0) return {v == 0 ? 0.0 : INFINITY, v != 0};
  return {v / i, false};
}

}  // namespace sotdtco

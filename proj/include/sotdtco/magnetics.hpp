#pragma once

#include <cmath>
#include <vector>

#include "constants.hpp"
#include "error.hpp"

namespace sotdtco {

/** \brief Magnetic/electrical MTJ + SOT track parameters in datasheet units.
 *
 *  Lengths in nm, fields in mT, RA in ohm um^2, tau_d in ns, m_s in A/m.
 *  delta is referenced to t_ref.
 */
struct MtjStack {
  double d_mtj = 63.0;
  double delta = 40.0;
  double w_sot = 99.0;
  double d_sot = 3.5;
  double b_k = 219.0;
  double b_x = 25.0;
  double tmr = 86.0;
  double ra = 11.0;
  double d_fl = 1.0;
  double theta_sh = 0.158;
  double m_s = 0.0;    // 0 means "derive from delta"
  double tau_d = 1.2;  // ns, calibrated
  double t_ref = 298.0;

  void validate() const;
};

struct RetentionSpec {
  double tau_ret;            // s
  double error_rate = 1e-6;  // F / N_bits
  double tau_0 = 1e-9;       // s
  double t_op = 353.0;       // K
  double t_ref = 298.0;      // K

  void validate() const {
    require(error_rate > 0 && error_rate < 1, "invalid_retention", "error_rate must be in (0,1)");
    require(tau_0 > 0, "invalid_retention", "tau_0 must be positive");
    require(tau_ret > tau_0, "invalid_retention", "tau_ret must exceed tau_0");
    require(t_op > 0 && t_ref > 0, "invalid_retention", "temperatures must be positive");
  }
};

struct DeltaPair {
  double at_t_op;
  double renormalized;
};

inline DeltaPair delta_from_retention(const RetentionSpec& s) {
  s.validate();
  // -ln(1-F) via log1p keeps precision for tiny error rates
  double inner = (s.tau_0 / s.tau_ret) * (-std::log1p(-s.error_rate));
  require(inner > 0 && inner < 1, "domain", "retention spec gives non-physical barrier");
  double d = -std::log(inner);
  return {d, d * s.t_op / s.t_ref};
}

inline double retention_from_delta(double delta_at_t_op, double error_rate, double tau_0) {
  require(delta_at_t_op > 0, "domain", "delta must be positive");
  return tau_0 * (-std::log1p(-error_rate)) * std::exp(delta_at_t_op);
}

namespace detail {
inline double junction_area_m2(double d_mtj_nm) {
  double r = 0.5 * d_mtj_nm * 1e-9;
  return phys::pi * r * r;
}
}  // namespace detail

inline double delta_from_stack(double b_k_mT, double m_s, double d_fl_nm, double d_mtj_nm,
                               double temperature) {
  require(b_k_mT > 0 && m_s > 0 && d_fl_nm > 0 && d_mtj_nm > 0 && temperature > 0, "domain",
          "delta_from_stack: inputs must be positive");
  double energy = 0.5 * (b_k_mT * 1e-3) * m_s * detail::junction_area_m2(d_mtj_nm) * d_fl_nm * 1e-9;
  return energy / (phys::k_b * temperature);
}

inline double m_s_from_delta(double delta, double b_k_mT, double d_fl_nm, double d_mtj_nm,
                             double temperature) {
  require(delta > 0 && b_k_mT > 0 && d_fl_nm > 0 && d_mtj_nm > 0 && temperature > 0, "domain",
          "m_s_from_delta: inputs must be positive");
  double per_ms = 0.5 * (b_k_mT * 1e-3) * detail::junction_area_m2(d_mtj_nm) * d_fl_nm * 1e-9;
  return delta * phys::k_b * temperature / per_ms;
}

inline void MtjStack::validate() const {
  require(d_mtj > 0 && w_sot > 0 && d_sot > 0 && d_fl > 0, "invalid_stack", "stack: lengths must be positive");
  require(b_x > 0 && b_x < b_k, "invalid_stack", "stack: need 0 < b_x < b_k");
  require(theta_sh > 0 && theta_sh <= 1, "invalid_stack", "stack: theta_sh must be in (0,1]");
  require(delta > 0, "invalid_stack", "stack: delta must be positive");
  require(tau_d > 0, "invalid_stack", "stack: tau_d must be positive");
  require(ra > 0 && tmr >= 0, "invalid_stack", "stack: ra must be positive, tmr non-negative");
  if (m_s > 0) {
    double d = delta_from_stack(b_k, m_s, d_fl, d_mtj, t_ref);
    require(std::abs(d - delta) <= 1e-9 * delta, "invalid_stack",
            "stack: m_s inconsistent with delta");
  }
}

enum class IcForm { material, thermal };

inline double pulse_factor(double tau_s, double tau_d_ns) {
  double x = phys::pi * tau_d_ns * 1e-9 / tau_s;
  return std::sqrt(1 + x * x);
}

/** \brief Critical SOT switching current (A) for a write pulse tau (s).
 *
 *  material form: uses M_s, B_k, B_x directly.
 *  thermal form:  uses Delta at the given temperature.
 */
inline double critical_current(double tau_s, const MtjStack& s, double temperature, IcForm form) {
  require(tau_s > 0, "domain", "critical_current: tau must be positive");
  const double w = s.w_sot * 1e-9, d = s.d_sot * 1e-9;
  const double pf = pulse_factor(tau_s, s.tau_d);
  if (form == IcForm::material) {
    double ms = s.m_s > 0 ? s.m_s : m_s_from_delta(s.delta, s.b_k, s.d_fl, s.d_mtj, temperature);
    double field = (s.b_k * 1e-3) / 2 - (s.b_x * 1e-3) / std::sqrt(2.0);
    return 2 * phys::e * ms * s.d_fl * 1e-9 * w * d / (phys::hbar * s.theta_sh) * field * pf;
  }
  double dm = s.d_mtj * 1e-9;
  double field = 1 - std::sqrt(2.0) * s.b_x / s.b_k;
  return 8 * phys::e * phys::k_b * temperature * w * d * s.delta /
         (phys::pi * phys::hbar * s.theta_sh * dm * dm) * field * pf;
}

/// Largest delta whose critical current is within i_available (thermal form is linear in delta).
inline double max_delta_for_current(double i_available, double tau_s, const MtjStack& s,
                                    double temperature) {
  require(i_available > 0, "domain", "max_delta_for_current: current must be positive");
  MtjStack unit = s;
  unit.delta = 1.0;
  unit.m_s = 0;
  return i_available / critical_current(tau_s, unit, temperature, IcForm::thermal);
}

struct IcRow {
  double tau_ns;
  double delta;
  double ic_uA;
};

inline std::vector<IcRow> ic_curve(const std::vector<double>& tau_ns_grid,
                                   const std::vector<double>& deltas, const MtjStack& s,
                                   double temperature) {
  for (std::size_t i = 1; i < tau_ns_grid.size(); ++i)
    require(tau_ns_grid[i] > tau_ns_grid[i - 1], "domain", "ic_curve: tau grid must be ascending");
  std::vector<IcRow> rows;
  for (double d : deltas) {
    MtjStack k = s;
    k.delta = d;
    k.m_s = 0;
    for (double t : tau_ns_grid)
      rows.push_back({t, d, critical_current(t * 1e-9, k, temperature, IcForm::thermal) * 1e6});
  }
  return rows;
}

}  // namespace sotdtco

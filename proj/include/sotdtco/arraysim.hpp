#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "devices.hpp"
#include "magnetics.hpp"
#include "techmodel.hpp"

namespace sotdtco {

// ---------------------------------------------------------------------------
// Write path

struct WriteSetup {
  double v_write = 0.7;          // V
  double gate_overdrive = 0.1;   // V above v_write
  double r_sot = 660.0;          // ohm
  double tau_write = 10e-9;      // s
  // write transistor fingers / fins per config
  std::array<int, 5> nf = {3, 3, 2, 2, 1};
  std::array<int, 5> nfin = {3, 3, 6, 5, 4};
  // lumped access/contact resistance per config (calibrated)
  std::array<double, 5> r_access = {1622.04, 1622.04, 1449.58, 1327.87, 0.0};

  void validate() const {
    require(v_write > 0 && gate_overdrive >= 0 && r_sot > 0 && tau_write > 0, "invalid_write",
            "write: voltages, r_sot and tau_write must be positive");
    for (std::size_t i = 0; i < 5; ++i) {
      require(nf[i] >= 1 && nfin[i] >= 1, "invalid_write", "write: nf/nfin must be >= 1");
      require(r_access[i] >= 0, "invalid_write", "write: r_access must be >= 0");
    }
  }
};

struct WriteCase {
  CellConfig config = CellConfig::RV2T1R;
  int rows = 128;
  Corner corner = Corner::tt;
};

struct WritePath {
  Circuit circuit;
  int source_element;
};

inline WritePath build_write_path(const WriteCase& wc, const TechNode& tech, const FinFetModel& fet,
                                  const WriteSetup& ws) {
  require(wc.rows >= 1, "domain", "write: rows must be >= 1");
  const std::size_t k = index_of(wc.config);
  FinFetModel m = fet;
  m.nf = ws.nf[k];
  m.nfin = ws.nfin[k];
  WritePath p;
  Circuit& c = p.circuit;
  int top = c.add_node("bl_drv");
  int far = c.add_node("bl_far");
  int drn = c.add_node("wrt_drain");
  int gate = c.add_node("wwl");
  p.source_element = c.vsource(top, 0, ws.v_write, "supply");
  c.vsource(gate, 0, ws.v_write + ws.gate_overdrive, "gate");
  c.resistor(top, far, bitline_resistance(wc.config, wc.rows, tech), "line");
  double r_track = ws.r_sot + ws.r_access[k];
  c.resistor(far, drn, r_track, "sot");
  Corner corner = wc.corner;
  c.fet(drn, gate, 0, [m, corner](double vgs, double vds) { return finfet_current(m, vgs, vds, corner); },
        "wrt");
  return p;
}

/// Supply current of the farthest cell.
inline double write_current(const WriteCase& wc, const TechNode& tech, const FinFetModel& fet,
                            const WriteSetup& ws) {
  auto p = build_write_path(wc, tech, fet, ws);
  auto r = solve_dc(p.circuit);
  // branch current runs + -> - inside the source, so the delivered current is its negative
  return -r.i_src[0];
}

struct WriteFeasibility {
  double i_cell;
  std::vector<std::pair<double, bool>> meets;  // (delta target, passes)
};

inline WriteFeasibility write_feasibility(const WriteCase& wc, const TechNode& tech,
                                          const FinFetModel& fet, const WriteSetup& ws,
                                          const MtjStack& stack, const std::vector<double>& deltas) {
  WriteFeasibility out{write_current(wc, tech, fet, ws), {}};
  for (double d : deltas) {
    MtjStack s = stack;
    s.delta = d;
    s.m_s = 0;
    double ic = critical_current(ws.tau_write, s, s.t_ref, IcForm::thermal);
    out.meets.emplace_back(d, out.i_cell >= ic);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Read path

enum class Selector { finfet, igzo, tunnel, schottky };

inline std::string_view to_string(Selector s) {
  switch (s) {
    case Selector::finfet: return "finfet";
    case Selector::igzo: return "igzo";
    case Selector::tunnel: return "tunnel";
    case Selector::schottky: return "schottky";
  }
  return "?";
}

inline Selector parse_selector(std::string_view s) {
  if (s == "finfet") return Selector::finfet;
  if (s == "igzo") return Selector::igzo;
  if (s == "tunnel") return Selector::tunnel;
  if (s == "schottky") return Selector::schottky;
  throw Error("unknown_selector", "unknown selector '" + std::string(s) + "'");
}

inline Selector default_selector(CellConfig c) {
  switch (c) {
    case CellConfig::FV2T1R:
    case CellConfig::RV2T1R: return Selector::finfet;
    case CellConfig::T1R1T:
    case CellConfig::T1R1T_VGA: return Selector::igzo;
    case CellConfig::T1D1R: return Selector::tunnel;
  }
  return Selector::finfet;
}

/// Reverse-biased drain junction of an unselected access device.
struct JunctionLeak {
  double i_s = 0.0;     // A per cell
  double v_knee = 0.05; // V
  double operator()(double v) const { return i_s * std::tanh(v / v_knee); }
};

enum class Topology { lumped, unrolled };

struct ReadSetup {
  double line_cap_per_cell = 4.981e-17;  // F
  double periphery_cap = 0.0;           // F
  double sense_threshold = 0.1;         // V
  double window = 10e-9;                // s
  double dt_out = 2e-12;                // s
  double dv_max = 2.5e-4;               // V
  double r_sot_share = 330.0;           // ohm, half the track is in the read path
  // 2T1R read transistor
  double rdt_gate = 0.7;
  int rdt_nf = 2;
  int rdt_nfin = 3;
  JunctionLeak finfet_junction{3.0e-9, 0.05};
  // IGZO selected read wordline = v_read + rwl_offset
  double rwl_offset = 0.363851;
  JunctionLeak igzo_junction{0.0, 0.05};
  IgzoFetModel igzo{};
  DiodeModel tunnel{DiodeKind::tunnel_symmetric, 7.05e-9, 0.2535, 0.2535, 0.0, 0.0};
  DiodeModel schottky{DiodeKind::schottky_asymmetric, 4.831e-17, 0.0472095, 1.0, 0.0, 6.95444e-8};

  void validate() const {
    require(line_cap_per_cell > 0 && periphery_cap >= 0, "invalid_read", "read: capacitances must be positive");
    require(sense_threshold > 0 && window > 0 && dt_out > 0 && dv_max > 0, "invalid_read",
            "read: threshold, window and steps must be positive");
    require(rdt_nf >= 1 && rdt_nfin >= 1, "invalid_read", "read: rdt fins must be >= 1");
    igzo.validate();
    tunnel.validate();
    schottky.validate();
  }
};

struct ReadCase {
  CellConfig config = CellConfig::RV2T1R;
  Selector selector = Selector::finfet;
  int rows = 128;
  int cols = 128;
  double v_read = 0.7;
  double ra = 20.0;
  double tmr = 86.0;
  double vt_shift = 0.0;               // IGZO only
  MtjState unselected = MtjState::P;
  Topology topology = Topology::lumped;

  void validate() const {
    require(rows >= 1 && cols >= 1, "domain", "read: rows/cols must be >= 1");
    require(v_read > 0, "domain", "read: v_read must be positive");
    require(ra > 0 && tmr >= 0, "domain", "read: ra must be positive, tmr >= 0");
  }
};

/// Element indices of interest in a read circuit.
struct ReadCircuit {
  Circuit circuit;
  int rl_node = 0;                 // sensed node
  std::vector<int> caps;
  int sel_element = -1;            // selected selector
  std::vector<int> sel_path;       // selected-cell series elements (for i_dchg use sel_element)
  std::vector<int> sneak_elements; // per unselected branch entry element (current into branch from RL side)
  std::vector<int> line_elements;
  std::vector<int> mtj_elements;
  std::vector<int> sot_elements;
  std::vector<int> sneak_dissipators;
  std::vector<int> static_sources;
  double c_total = 0;
  double v_read = 0;
  double r_p = 0;
};

namespace detail {

struct CellDevices {
  FinFetModel rdt;
  IgzoFetModel igzo;
  DiodeModel diode;
};

inline CellDevices read_devices(const ReadCase& rc, const ReadSetup& rs, const FinFetModel& fet) {
  CellDevices d{fet, rs.igzo.shifted(rc.vt_shift), rc.selector == Selector::schottky ? rs.schottky : rs.tunnel};
  d.rdt.nf = rs.rdt_nf;
  d.rdt.nfin = rs.rdt_nfin;
  return d;
}

}  // namespace detail

/** \brief Reduced column model for voltage sensing.
 *
 *  One precharged line node; the selected cell is explicit behind the line
 *  resistance; the unselected cells either form one branch scaled by rows-1
 *  (lumped) or are laid out on a resistive ladder with distributed line
 *  capacitance (unrolled).
 */
inline ReadCircuit build_read_array(const ReadCase& rc, MtjState selected, const TechNode& tech,
                                    const FinFetModel& fet, const ReadSetup& rs) {
  rc.validate();
  ReadCircuit out;
  Circuit& c = out.circuit;
  const auto dev = detail::read_devices(rc, rs, fet);
  MtjModel mtj{rc.ra, rc.tmr, 63.0, selected};
  MtjModel mtj_u{rc.ra, rc.tmr, 63.0, rc.unselected};
  const double r_sel_mtj = mtj_resistance(mtj);
  const double r_uns = mtj_resistance(mtj_u);
  out.r_p = mtj.r_p();
  out.v_read = rc.v_read;
  const double r_line = bitline_resistance(rc.config, rc.rows, tech);
  const int n_uns = rc.rows - 1;
  out.c_total = rc.rows * rs.line_cap_per_cell + rs.periphery_cap;

  const bool diode = rc.selector == Selector::tunnel || rc.selector == Selector::schottky;
  int gate_sel = 0, rwl_uns = 0;
  if (rc.selector == Selector::finfet) {
    gate_sel = c.add_node("rwl_sel");
    c.vsource(gate_sel, 0, rs.rdt_gate, "drive");
  } else if (rc.selector == Selector::igzo) {
    gate_sel = c.add_node("rwl_sel");
    c.vsource(gate_sel, 0, rc.v_read + rs.rwl_offset, "drive");
  } else if (n_uns > 0) {
    // dynamic inhibition: unselected wordlines held at the precharge level
    rwl_uns = c.add_node("rwl_uns");
    out.static_sources.push_back(c.vsource(rwl_uns, 0, rc.v_read, "inhibit"));
  }

  // One cell hanging off line node `at`, ending at `foot`. Returns the element
  // through which the cell current enters from the line side.
  auto add_cell = [&](int at, int foot, int gate, double r_mtj, double mult, bool sel,
                      const std::string& id) -> int {
    int entry = -1;
    if (rc.selector == Selector::finfet) {
      // RL -> MTJ -> SOT share -> read transistor -> ground
      int a = c.add_node(id + "_mtj");
      int b = c.add_node(id + "_sot");
      entry = c.resistor(at, a, r_mtj / mult, sel ? "mtj" : "sneak");
      int e2 = c.resistor(a, b, rs.r_sot_share / mult, sel ? "sot" : "sneak");
      FinFetModel m = dev.rdt;
      int e3 = c.fet(b, gate, 0, [m](double vgs, double vds) { return finfet_current(m, vgs, vds, Corner::tt); },
                     sel ? "sel" : "sneak", mult);
      if (sel) {
        out.mtj_elements.push_back(entry);
        out.sot_elements.push_back(e2);
        out.sel_element = e3;
      } else {
        out.sneak_dissipators.insert(out.sneak_dissipators.end(), {entry, e2, e3});
        JunctionLeak j = rs.finfet_junction;
        if (j.i_s > 0) {
          int ej = c.two_terminal(b, 0, j, "sneak", mult);
          out.sneak_dissipators.push_back(ej);
        }
      }
      (void)foot;
      return entry;
    }
    if (rc.selector == Selector::igzo) {
      // RL -> IGZO (drain) ; source -> MTJ -> SOT share -> ground
      int a = c.add_node(id + "_src");
      int b = c.add_node(id + "_sot");
      IgzoFetModel m = dev.igzo;
      entry = c.fet(at, gate, a, [m](double vgs, double vds) { return igzo_current(m, vgs, vds); },
                    sel ? "sel" : "sneak", mult);
      int e2 = c.resistor(a, b, r_mtj / mult, sel ? "mtj" : "sneak");
      int e3 = c.resistor(b, 0, rs.r_sot_share / mult, sel ? "sot" : "sneak");
      if (sel) {
        out.sel_element = entry;
        out.mtj_elements.push_back(e2);
        out.sot_elements.push_back(e3);
      } else {
        out.sneak_dissipators.insert(out.sneak_dissipators.end(), {entry, e2, e3});
      }
      (void)foot;
      return entry;
    }
    // diode cell: line -> diode -> MTJ -> SOT share -> wordline
    int a = c.add_node(id + "_d");
    int b = c.add_node(id + "_sot");
    DiodeModel d = dev.diode;
    entry = c.two_terminal(at, a, [d](double v) { return diode_current(d, v); }, sel ? "sel" : "sneak", mult);
    int e2 = c.resistor(a, b, r_mtj / mult, sel ? "mtj" : "sneak");
    int e3 = c.resistor(b, foot, rs.r_sot_share / mult, sel ? "sot" : "sneak");
    if (sel) {
      out.sel_element = entry;
      out.mtj_elements.push_back(e2);
      out.sot_elements.push_back(e3);
    } else {
      out.sneak_dissipators.insert(out.sneak_dissipators.end(), {entry, e2, e3});
    }
    return entry;
  };

  // junction leak of unselected IGZO drains, straight from the line
  auto add_igzo_junction = [&](int at, double mult) {
    if (rc.selector == Selector::igzo && rs.igzo_junction.i_s > 0) {
      int e = c.two_terminal(at, 0, rs.igzo_junction, "sneak", mult);
      out.sneak_elements.push_back(e);
      out.sneak_dissipators.push_back(e);
    }
  };

  if (rc.topology == Topology::lumped || rc.rows == 1) {
    int rl = c.add_node("rl");
    out.rl_node = rl;
    out.caps.push_back(c.capacitor(rl, 0, out.c_total, "cap"));
    int far = c.add_node("rl_far");
    // the line charge sits on average half-way along the column
    out.line_elements.push_back(c.resistor(rl, far, 0.5 * r_line, "line"));
    add_cell(far, 0, gate_sel, r_sel_mtj, 1.0, true, "sel");
    if (n_uns > 0) {
      int e = add_cell(rl, diode ? rwl_uns : 0, 0, r_uns, n_uns, false, "uns");
      out.sneak_elements.push_back(e);
      add_igzo_junction(rl, n_uns);
    }
  } else {
    // ladder: node 0 is the sense end, node rows-1 the far (selected) cell
    const double r_seg = r_line / rc.rows;
    const double c_cell = rs.line_cap_per_cell;
    std::vector<int> nodes;
    int rl = c.add_node("rl");
    out.rl_node = rl;
    if (rs.periphery_cap > 0) out.caps.push_back(c.capacitor(rl, 0, rs.periphery_cap, "cap"));
    int prev = rl;
    for (int k = 0; k < rc.rows; ++k) {
      int nk = c.add_node("rl_" + std::to_string(k));
      out.line_elements.push_back(c.resistor(prev, nk, r_seg, "line"));
      out.caps.push_back(c.capacitor(nk, 0, c_cell, "cap"));
      nodes.push_back(nk);
      prev = nk;
    }
    for (int k = 0; k < rc.rows - 1; ++k) {
      int e = add_cell(nodes[k], diode ? rwl_uns : 0, 0, r_uns, 1.0, false, "u" + std::to_string(k));
      out.sneak_elements.push_back(e);
      add_igzo_junction(nodes[k], 1.0);
    }
    add_cell(nodes.back(), 0, gate_sel, r_sel_mtj, 1.0, true, "sel");
  }
  return out;
}

struct EnergyBreakdown {
  double column_overhead = 0;
  double selector = 0;
  double rest = 0;
  double total() const { return column_overhead + selector + rest; }
};

struct SenseReport {
  bool feasible = false;
  std::optional<double> latency;
  double sm_max = 0;
  double t_sm_max = 0;
  double i_dchg = 0;
  double sigma_i_sneak = 0;   // signed: > 0 adds to the discharge, < 0 opposes it
  double ratio = 0;           // |i_dchg / sigma_i_sneak|
  double r_sel = 0;           // chord resistance of the selected selector at the sample instant
  double v_sel = 0;
  double v_rl_p = 0;          // sensed node (P) at the sample instant
  double tmr_eff = 0;         // series-dilution value from r_sel
  double r_p = 0;
  EnergyBreakdown energy;
  double supply_energy = 0;   // restore + static sources, for cross-check
  double energy_error = 0;    // worst transient balance error
  double max_kcl = 0;
  std::vector<double> t;
  std::vector<double> v_p, v_ap, sm;
  std::vector<double> i_dchg_p, i_sneak_p;
};

struct SenseRun {
  ReadCircuit rc;
  TransientResult tr;
};

inline SenseRun run_read_transient(const ReadCase& rcase, MtjState sel, const TechNode& tech,
                                   const FinFetModel& fet, const ReadSetup& rs) {
  SenseRun run{build_read_array(rcase, sel, tech, fet, rs), {}};
  std::vector<double> v0(run.rc.circuit.node_count(), 0.0);
  for (int n = 1; n < run.rc.circuit.node_count(); ++n) {
    const auto& nm = run.rc.circuit.node_name(n);
    if (nm.rfind("rl", 0) == 0) v0[n] = rcase.v_read;
  }
  TransientOptions opt;
  opt.t_stop = rs.window;
  opt.dt_out = rs.dt_out;
  opt.dv_max = rs.dv_max;
  run.tr = transient(run.rc.circuit, v0, opt);
  return run;
}

namespace detail {

inline double energy_at(const TransientResult& tr, const std::vector<int>& els, double tq) {
  double s = 0;
  for (int e : els) s += TransientResult::interp(tr.t, tr.energy_trace(e), tq);
  return s;
}

inline double current_at(const TransientResult& tr, const std::vector<int>& els, double tq) {
  double s = 0;
  for (int e : els) s += TransientResult::interp(tr.t, tr.current_trace(e), tq);
  return s;
}

}  // namespace detail

/** \brief P/AP precharge-and-discharge sensing of the far cell.
 *
 *  Currents, chord resistance and energy are taken from the P run at the
 *  first time SM reaches the threshold, or at the SM peak when it never does.
 */
inline SenseReport sense(const ReadCase& rcase, const TechNode& tech, const FinFetModel& fet,
                         const ReadSetup& rs) {
  rs.validate();
  auto p = run_read_transient(rcase, MtjState::P, tech, fet, rs);
  auto ap = run_read_transient(rcase, MtjState::AP, tech, fet, rs);
  SenseReport r;
  r.t = p.tr.t;
  r.v_p = p.tr.node_trace(p.rc.rl_node);
  auto vap_full = ap.tr.node_trace(ap.rc.rl_node);
  r.v_ap.resize(r.t.size());
  for (std::size_t k = 0; k < r.t.size(); ++k) r.v_ap[k] = TransientResult::interp(ap.tr.t, vap_full, r.t[k]);
  r.sm.resize(r.t.size());
  for (std::size_t k = 0; k < r.t.size(); ++k) r.sm[k] = std::abs(r.v_ap[k] - r.v_p[k]);
  r.i_dchg_p = p.tr.current_trace(p.rc.sel_element);
  r.i_sneak_p.assign(r.t.size(), 0.0);
  for (int e : p.rc.sneak_elements) {
    auto tr = p.tr.current_trace(e);
    for (std::size_t k = 0; k < tr.size(); ++k) r.i_sneak_p[k] += tr[k];
  }
  double tq = 0;
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    if (r.sm[k] > r.sm_max) {
      r.sm_max = r.sm[k];
      r.t_sm_max = r.t[k];
    }
    if (!r.latency && r.sm[k] >= rs.sense_threshold) {
      double t1 = r.t[k];
      if (k > 0) {
        double w = (rs.sense_threshold - r.sm[k - 1]) / (r.sm[k] - r.sm[k - 1]);
        t1 = r.t[k - 1] + w * (r.t[k] - r.t[k - 1]);
      }
      r.latency = t1;
    }
  }
  r.feasible = r.latency.has_value();
  tq = r.latency ? *r.latency : r.t_sm_max;

  const auto& tr = p.tr;
  r.i_dchg = TransientResult::interp(tr.t, r.i_dchg_p, tq);
  r.sigma_i_sneak = TransientResult::interp(tr.t, r.i_sneak_p, tq);
  r.ratio = r.sigma_i_sneak != 0 ? std::abs(r.i_dchg / r.sigma_i_sneak) : INFINITY;
  r.v_rl_p = TransientResult::interp(tr.t, r.v_p, tq);
  {
    const auto& el = p.rc.circuit.elements()[p.rc.sel_element];
    auto va = TransientResult::interp(tr.t, tr.node_trace(el.a), tq);
    auto vb = TransientResult::interp(tr.t, tr.node_trace(el.b), tq);
    r.v_sel = va - vb;
    auto s = secant_resistance(r.v_sel, r.i_dchg);
    r.r_sel = s.ohms;
  }
  r.r_p = p.rc.r_p;
  r.tmr_eff = std::isfinite(r.r_sel) ? effective_tmr(r.r_p, rcase.tmr, r.r_sel) : 0.0;

  // energy up to the sample instant, P run
  const double c = p.rc.c_total;
  const double dv = rcase.v_read - r.v_rl_p;
  r.energy.selector = detail::energy_at(tr, {p.rc.sel_element}, tq);
  std::vector<int> rest = p.rc.mtj_elements;
  rest.insert(rest.end(), p.rc.sot_elements.begin(), p.rc.sot_elements.end());
  r.energy.rest = detail::energy_at(tr, rest, tq);
  double sneak_e = detail::energy_at(tr, p.rc.sneak_dissipators, tq);
  double line_e = detail::energy_at(tr, p.rc.line_elements, tq);
  double restore_loss = 0.5 * c * dv * dv;
  r.energy.column_overhead = sneak_e + line_e + restore_loss;
  double static_e = -detail::energy_at(tr, p.rc.static_sources, tq);
  r.supply_energy = c * rcase.v_read * dv + static_e;
  r.energy_error = std::max(p.tr.energy_error, ap.tr.energy_error);
  r.max_kcl = std::max(p.tr.max_kcl_residual, ap.tr.max_kcl_residual);
  return r;
}

}  // namespace sotdtco

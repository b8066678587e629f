#pragma once

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arraysim.hpp"
#include "devices.hpp"
#include "magnetics.hpp"
#include "techmodel.hpp"

namespace sotdtco {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kConfigEnv = "SOTDTCO_CONFIG";

/// One named read design point.
struct ReadPoint {
  std::string name;
  CellConfig config = CellConfig::RV2T1R;
  Selector selector = Selector::finfet;
  double ra = 20;
  double tmr = 86;
  double v_read = 0.7;
  double vt_shift = 0.0;
  // reference values the point was reported with, 0 when absent
  double ref_i_dchg = 0;
  double ref_ratio = 0;
  double ref_r_sel = 0;
  double ref_sm = 0;
};

inline std::vector<ReadPoint> default_read_points() {
  ReadPoint a{"2T1R-RV", CellConfig::RV2T1R, Selector::finfet, 20, 86, 0.7, 0.0, 25e-6, 58, 3.4e3, 0.107};
  ReadPoint b{"1T1R1T-negVt", CellConfig::T1R1T, Selector::igzo, 500, 200, 1.8, 0.0, 0.83e-6, 2.1, 186e3, 0.102};
  ReadPoint c{"1T1R1T-posVt", CellConfig::T1R1T, Selector::igzo, 700, 110, 1.4, 0.12, 0.66e-6, 16, 338e3, 0.108};
  ReadPoint d{"1T1D1R-tunnel", CellConfig::T1D1R, Selector::tunnel, 100, 200, 2.1, 0.0, 4.0e-6, 1.1, 361e3, 0.099};
  ReadPoint e{"1T1D1R-schottky", CellConfig::T1D1R, Selector::schottky, 100, 150, 1.6, 0.0, 4.5e-6, 3.1, 197e3, 0.104};
  return {a, b, c, d, e};
}

struct SweepSpec {
  std::vector<double> ra;
  std::vector<double> tmr;
  std::vector<double> v_read;
  std::vector<double> vt_shift;
  std::vector<int> rows;
  std::size_t max_points = 20000;
};

struct RetentionSetup {
  double error_rate = 1e-6;
  double tau_0 = 1e-9;
  double t_op = 353.0;
  double t_ref = 298.0;
  std::vector<double> targets_s = {0.1, 1.0, 10.0, 100.0, 10 * kSecondsPerYear};
};

struct SwitchingSetup {
  std::vector<double> tau_ns = {1, 2, 3, 5, 7, 10, 15, 20, 30, 50, 70, 100};
  std::vector<double> deltas;  // empty: use the retention table (renormalized)
};

struct WriteTargets {
  // I_cell targets per config, corners ordered tt, ss, ff, in A
  std::vector<std::pair<CellConfig, std::array<double, 3>>> i_cell = {
      {CellConfig::RV2T1R, {124e-6, 115e-6, 130e-6}},
      {CellConfig::T1R1T, {152e-6, 140e-6, 159e-6}},
      {CellConfig::T1R1T_VGA, {147e-6, 135e-6, 156e-6}},
      {CellConfig::T1D1R, {134e-6, 115e-6, 154e-6}}};
  std::vector<BlTarget> bl = {{CellConfig::RV2T1R, 1700},
                              {CellConfig::T1R1T, 1400},
                              {CellConfig::T1R1T_VGA, 1400},
                              {CellConfig::T1D1R, 870}};
  int rows = 128;
  double ratio_1d_rv_tt = 134.0 / 124.0;
  double ratio_1t_rv_ss = 140.0 / 115.0;
  bool require_1d_ge_rv_ss = true;
};

struct RunConfig {
  TechNode tech;
  MtjStack stack;
  MtjStackGeometry stack_geometry;
  RetentionSetup retention;
  SwitchingSetup switching;
  FinFetModel finfet;
  WriteSetup write;
  ReadSetup read;
  std::vector<ReadPoint> read_points = default_read_points();
  SweepSpec sweep;
  std::vector<SramRoadmapEntry> roadmap = {{"N16", 90, 64, 0.021},
                                           {"N10", 66, 44, 0.021},
                                           {"N7", 56, 40, 0.021},
                                           {"N5", 50, 28, 0.021},
                                           {"N3", 48, 23, 0.021}};
  std::vector<int> writability_rows = {16, 32, 64, 128, 256};
  WriteTargets write_targets;
  std::string output_dir = "out";
  std::vector<std::string> formats = {"csv"};

  void validate() const {
    tech.validate();
    stack.validate();
    finfet.validate();
    write.validate();
    read.validate();
    RetentionSpec{1.0, retention.error_rate, retention.tau_0, retention.t_op, retention.t_ref}.validate();
    for (const auto& e : roadmap)
      require(e.sram_area_um2 > 0 && e.cpp > 0 && e.mp > 0, "invalid_config", "roadmap entries must be positive");
    for (int r : writability_rows) require(r >= 1, "invalid_config", "writability rows must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// Strict JSON reader: every key must be consumed, else the location is reported.

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error("config_type", path_ + ": expected an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw Error("config_unknown_key", path_ + "/" + it.key() + ": unknown key");
  }
  bool has(const std::string& k) const { return j_.contains(k); }
  std::string at(const std::string& k) const { return path_ + "/" + k; }

  template <class T>
  void get(const std::string& k, T& out) {
    if (!j_.contains(k)) return;
    seen_.insert(k);
    try {
      out = j_.at(k).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error("config_type", at(k) + ": wrong type");
    }
  }
  const json* sub(const std::string& k) {
    if (!j_.contains(k)) return nullptr;
    seen_.insert(k);
    return &j_.at(k);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

namespace detail {

template <class T>
void per_config(Reader& r, const std::string& k, std::array<T, 5>& arr) {
  const json* j = r.sub(k);
  if (!j) return;
  Reader rr(*j, r.at(k));
  for (auto c : kAllConfigs) rr.get(std::string(to_string(c)), arr[index_of(c)]);
}

inline void read_finfet(const json& j, const std::string& p, FinFetModel& m) {
  Reader r(j, p);
  r.get("isat_ref", m.isat_ref);
  r.get("g_ref", m.g_ref);
  r.get("v_gref", m.v_gref);
  if (const json* vt = r.sub("vt")) {
    Reader q(*vt, p + "/vt");
    q.get("tt", m.vt[0]);
    q.get("ss", m.vt[1]);
    q.get("ff", m.vt[2]);
  }
}

inline void read_igzo(const json& j, const std::string& p, IgzoFetModel& m) {
  Reader r(j, p);
  r.get("vt_lin", m.vt_lin);
  r.get("subthreshold_swing", m.ss);
  r.get("ispec_per_um", m.ispec_per_um);
  r.get("i_on_per_um", m.i_on_per_um);
  r.get("width_um", m.width_um);
  r.get("channel_length_nm", m.channel_length_nm);
  r.get("smoothing", m.smoothing);
  r.get("dibl", m.dibl);
}

inline void read_diode(const json& j, const std::string& p, DiodeModel& d) {
  Reader r(j, p);
  r.get("i_0", d.i_0);
  r.get("v_0_fwd", d.v_0_fwd);
  r.get("v_0_rev", d.v_0_rev);
  r.get("r_series", d.r_series);
  r.get("perimeter_leak_g", d.perimeter_leak_g);
  if (d.kind == DiodeKind::tunnel_symmetric) d.v_0_rev = d.v_0_fwd;
}

inline void read_junction(const json& j, const std::string& p, JunctionLeak& jl) {
  Reader r(j, p);
  r.get("i_s", jl.i_s);
  r.get("v_knee", jl.v_knee);
}

}  // namespace detail

inline void apply_json(RunConfig& c, const json& j) {
  Reader root(j, "");
  int version = kSchemaVersion;
  root.get("schema_version", version);
  require(version == kSchemaVersion, "config_version",
          "/schema_version: unsupported version " + std::to_string(version));
  std::string comment;
  root.get("comment", comment);

  if (const json* t = root.sub("tech")) {
    Reader r(*t, "/tech");
    r.get("node_label", c.tech.node_label);
    r.get("cpp", c.tech.cpp);
    r.get("mp", c.tech.mp);
    r.get("fp", c.tech.fp);
    r.get("bl_resistance_per_length", c.tech.bl_resistance_per_length);
    r.get("line_width_m2", c.tech.line_width_m2);
    r.get("rv_landing_depth", c.tech.rv_landing_depth);
    r.get("sram_target_um2", c.tech.sram_target_um2);
    detail::per_config(r, "width_cpp", c.tech.width_cpp);
    detail::per_config(r, "height_mp", c.tech.height_mp);
  }
  if (const json* s = root.sub("stack")) {
    Reader r(*s, "/stack");
    r.get("d_mtj", c.stack.d_mtj);
    r.get("delta", c.stack.delta);
    r.get("w_sot", c.stack.w_sot);
    r.get("d_sot", c.stack.d_sot);
    r.get("b_k", c.stack.b_k);
    r.get("b_x", c.stack.b_x);
    r.get("tmr", c.stack.tmr);
    r.get("ra", c.stack.ra);
    r.get("d_fl", c.stack.d_fl);
    r.get("theta_sh", c.stack.theta_sh);
    r.get("m_s", c.stack.m_s);
    r.get("tau_d", c.stack.tau_d);
    r.get("t_ref", c.stack.t_ref);
  }
  if (const json* g = root.sub("stack_geometry")) {
    Reader r(*g, "/stack_geometry");
    if (const json* layers = r.sub("layers")) {
      require(layers->is_array(), "config_type", "/stack_geometry/layers: expected an array");
      c.stack_geometry.layers.clear();
      for (std::size_t i = 0; i < layers->size(); ++i) {
        LayerHeight l;
        Reader q((*layers)[i], "/stack_geometry/layers/" + std::to_string(i));
        q.get("name", l.name);
        q.get("nm", l.nm);
        require(l.nm > 0, "invalid_config", "/stack_geometry/layers/" + std::to_string(i) + ": nm must be positive");
        c.stack_geometry.layers.push_back(l);
      }
    }
  }
  if (const json* rt = root.sub("retention")) {
    Reader r(*rt, "/retention");
    r.get("error_rate", c.retention.error_rate);
    r.get("tau_0", c.retention.tau_0);
    r.get("t_op", c.retention.t_op);
    r.get("t_ref", c.retention.t_ref);
    r.get("targets_s", c.retention.targets_s);
  }
  if (const json* sw = root.sub("switching")) {
    Reader r(*sw, "/switching");
    r.get("tau_ns", c.switching.tau_ns);
    r.get("deltas", c.switching.deltas);
  }
  if (const json* d = root.sub("devices")) {
    Reader r(*d, "/devices");
    if (const json* x = r.sub("finfet")) detail::read_finfet(*x, "/devices/finfet", c.finfet);
    if (const json* x = r.sub("igzo")) detail::read_igzo(*x, "/devices/igzo", c.read.igzo);
    if (const json* x = r.sub("tunnel")) detail::read_diode(*x, "/devices/tunnel", c.read.tunnel);
    if (const json* x = r.sub("schottky")) detail::read_diode(*x, "/devices/schottky", c.read.schottky);
    if (const json* x = r.sub("finfet_junction"))
      detail::read_junction(*x, "/devices/finfet_junction", c.read.finfet_junction);
    if (const json* x = r.sub("igzo_junction"))
      detail::read_junction(*x, "/devices/igzo_junction", c.read.igzo_junction);
  }
  if (const json* w = root.sub("write")) {
    Reader r(*w, "/write");
    r.get("v_write", c.write.v_write);
    r.get("gate_overdrive", c.write.gate_overdrive);
    r.get("r_sot", c.write.r_sot);
    r.get("tau_write_ns", c.write.tau_write);
    if (r.has("tau_write_ns")) c.write.tau_write *= 1e-9;
    detail::per_config(r, "nf", c.write.nf);
    detail::per_config(r, "nfin", c.write.nfin);
    detail::per_config(r, "r_access", c.write.r_access);
    r.get("writability_rows", c.writability_rows);
  }
  if (const json* rd = root.sub("read")) {
    Reader r(*rd, "/read");
    double fF = c.read.line_cap_per_cell * 1e15;
    r.get("line_cap_per_cell_fF", fF);
    c.read.line_cap_per_cell = fF * 1e-15;
    double pf = c.read.periphery_cap * 1e15;
    r.get("periphery_cap_fF", pf);
    c.read.periphery_cap = pf * 1e-15;
    r.get("sense_threshold", c.read.sense_threshold);
    double w = c.read.window * 1e9, dt = c.read.dt_out * 1e12;
    r.get("window_ns", w);
    r.get("dt_out_ps", dt);
    c.read.window = w * 1e-9;
    c.read.dt_out = dt * 1e-12;
    r.get("dv_max", c.read.dv_max);
    r.get("r_sot_share", c.read.r_sot_share);
    r.get("rdt_gate", c.read.rdt_gate);
    r.get("rdt_nf", c.read.rdt_nf);
    r.get("rdt_nfin", c.read.rdt_nfin);
    r.get("rwl_offset", c.read.rwl_offset);
  }
  if (const json* pts = root.sub("read_points")) {
    require(pts->is_array(), "config_type", "/read_points: expected an array");
    c.read_points.clear();
    for (std::size_t i = 0; i < pts->size(); ++i) {
      std::string p = "/read_points/" + std::to_string(i);
      Reader r((*pts)[i], p);
      ReadPoint rp;
      std::string cfg = "2T1R-RV", sel;
      r.get("name", rp.name);
      r.get("config", cfg);
      rp.config = parse_config(cfg);
      rp.selector = default_selector(rp.config);
      r.get("selector", sel);
      if (!sel.empty()) rp.selector = parse_selector(sel);
      r.get("ra", rp.ra);
      r.get("tmr", rp.tmr);
      r.get("v_read", rp.v_read);
      r.get("vt_shift", rp.vt_shift);
      r.get("ref_i_dchg", rp.ref_i_dchg);
      r.get("ref_ratio", rp.ref_ratio);
      r.get("ref_r_sel", rp.ref_r_sel);
      r.get("ref_sm", rp.ref_sm);
      c.read_points.push_back(rp);
    }
  }
  if (const json* s = root.sub("sweep")) {
    Reader r(*s, "/sweep");
    r.get("ra", c.sweep.ra);
    r.get("tmr", c.sweep.tmr);
    r.get("v_read", c.sweep.v_read);
    r.get("vt_shift", c.sweep.vt_shift);
    r.get("rows", c.sweep.rows);
    r.get("max_points", c.sweep.max_points);
  }
  if (const json* rm = root.sub("roadmap")) {
    require(rm->is_array(), "config_type", "/roadmap: expected an array");
    c.roadmap.clear();
    for (std::size_t i = 0; i < rm->size(); ++i) {
      Reader r((*rm)[i], "/roadmap/" + std::to_string(i));
      SramRoadmapEntry e{};
      r.get("node", e.node_label);
      r.get("cpp", e.cpp);
      r.get("mp", e.mp);
      r.get("sram_area_um2", e.sram_area_um2);
      c.roadmap.push_back(e);
    }
  }
  if (const json* cal = root.sub("calibration")) {
    Reader r(*cal, "/calibration");
    r.get("rows", c.write_targets.rows);
    if (const json* ic = r.sub("i_cell_uA")) {
      Reader q(*ic, "/calibration/i_cell_uA");
      c.write_targets.i_cell.clear();
      for (auto cfg : kAllConfigs) {
        std::string k(to_string(cfg));
        if (!q.has(k)) continue;
        std::map<std::string, double> m;
        q.get(k, m);
        std::array<double, 3> v{};
        for (auto corner : {Corner::tt, Corner::ss, Corner::ff}) {
          auto it = m.find(std::string(to_string(corner)));
          require(it != m.end(), "config_missing", "/calibration/i_cell_uA/" + k + ": missing corner");
          v[static_cast<int>(corner)] = it->second * 1e-6;
        }
        c.write_targets.i_cell.emplace_back(cfg, v);
      }
    }
    if (const json* bl = r.sub("bl_resistance_kohm")) {
      Reader q(*bl, "/calibration/bl_resistance_kohm");
      c.write_targets.bl.clear();
      for (auto cfg : kAllConfigs) {
        std::string k(to_string(cfg));
        double v = 0;
        q.get(k, v);
        if (v > 0) c.write_targets.bl.push_back({cfg, v * 1e3});
      }
    }
    r.get("ratio_1d_rv_tt", c.write_targets.ratio_1d_rv_tt);
    r.get("ratio_1t_rv_ss", c.write_targets.ratio_1t_rv_ss);
    r.get("require_1d_ge_rv_ss", c.write_targets.require_1d_ge_rv_ss);
  }
  if (const json* o = root.sub("output")) {
    Reader r(*o, "/output");
    r.get("dir", c.output_dir);
    r.get("formats", c.formats);
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config_missing", "cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("config_parse", path + ": " + e.what());
  }
  RunConfig c;
  apply_json(c, j);
  c.validate();
  return c;
}

/// Fitted parameter document: only the values calibration touches.
inline json fitted_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["tech"]["bl_resistance_per_length"] = c.tech.bl_resistance_per_length;
  const auto& f = c.finfet;
  j["devices"]["finfet"] = {{"isat_ref", f.isat_ref}, {"g_ref", f.g_ref}, {"v_gref", f.v_gref},
                            {"vt", {{"tt", f.vt[0]}, {"ss", f.vt[1]}, {"ff", f.vt[2]}}}};
  const auto& g = c.read.igzo;
  j["devices"]["igzo"] = {{"vt_lin", g.vt_lin}, {"subthreshold_swing", g.ss}, {"ispec_per_um", g.ispec_per_um},
                          {"i_on_per_um", g.i_on_per_um}, {"width_um", g.width_um},
                          {"channel_length_nm", g.channel_length_nm}, {"smoothing", g.smoothing},
                          {"dibl", g.dibl}};
  auto diode = [](const DiodeModel& d) {
    json x = {{"i_0", d.i_0}, {"v_0_fwd", d.v_0_fwd}};
    if (d.kind == DiodeKind::schottky_asymmetric) {
      x["v_0_rev"] = d.v_0_rev;
      x["perimeter_leak_g"] = d.perimeter_leak_g;
    }
    x["r_series"] = d.r_series;
    return x;
  };
  j["devices"]["tunnel"] = diode(c.read.tunnel);
  j["devices"]["schottky"] = diode(c.read.schottky);
  json ra;
  for (auto cfg : kAllConfigs) ra[std::string(to_string(cfg))] = c.write.r_access[index_of(cfg)];
  j["write"]["r_access"] = ra;
  j["read"] = {{"line_cap_per_cell_fF", c.read.line_cap_per_cell * 1e15}, {"rwl_offset", c.read.rwl_offset}};
  return j;
}

}  // namespace sotdtco

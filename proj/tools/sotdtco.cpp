// sotdtco: bitcell area, write and read exploration from one JSON config.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <sotdtco/calibrate.hpp>
#include <sotdtco/config.hpp>
#include <sotdtco/explorer.hpp>
#include <sotdtco/report.hpp>

using namespace sotdtco;

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::vector<std::string> formats;
  unsigned jobs = 1;
};

struct Overrides {
  std::optional<int> rows;
  std::string corner = "ss";
  std::string cell;
  std::string selector;
  std::optional<double> vread, ra, tmr, vt_shift;
};

RunConfig load(const Globals& g) {
  std::string path = g.config;
  if (path.empty())
    if (const char* env = std::getenv(kConfigEnv)) path = env;
  RunConfig c = path.empty() ? RunConfig{} : load_config(path);
  if (path.empty()) c.validate();
  return c;
}

bool want(const Globals& g, const RunConfig& c, const std::string& f) {
  const auto& v = g.formats.empty() ? c.formats : g.formats;
  return std::find(v.begin(), v.end(), f) != v.end();
}

std::string corner_str(Corner k) { return std::string(to_string(k)); }
std::string cfg_str(CellConfig c) { return std::string(to_string(c)); }

// ---------------------------------------------------------------------------

void cmd_area(const Globals& g, const RunConfig& c, OutputSet& out, json& summary) {
  Table t({"config", "width_cpp", "height_mp", "width_nm", "height_nm", "area_um2", "meets_target",
           "unrealistic"});
  std::vector<std::string> cats;
  std::vector<double> areas;
  for (auto k : kAllConfigs) {
    auto geo = bitcell_geometry(k, c.tech);
    t.row() << cfg_str(k) << geo.width_cpp << geo.height_mp << geo.width_nm << geo.height_nm << geo.area_um2
            << geo.meets_sram_target << geo.unrealistic;
    cats.push_back(cfg_str(k));
    areas.push_back(geo.area_um2);
    summary["area_um2"][cfg_str(k)] = geo.area_um2;
  }
  Table v({"route", "height_nm", "width_nm", "aspect_ratio", "integration_risk"});
  for (const auto& r : via_report(c.stack_geometry, c.tech)) {
    v.row() << r.route << r.height_nm << r.width_nm << r.aspect_ratio << r.integration_risk;
    summary["via"][r.route] = {{"aspect_ratio", r.aspect_ratio}, {"integration_risk", r.integration_risk}};
  }
  out.add("area.csv", t.csv());
  out.add("via.csv", v.csv());
  if (want(g, c, "svg"))
    out.add("area.svg", svg_stacked_bars(cats, {"area [um^2]"}, {areas},
                                         {640, 420, "Bitcell area, " + c.tech.node_label, "", "area [um^2]"}));
}

void cmd_profile(const Globals& g, const RunConfig& c, const std::string& roadmap_path, OutputSet& out,
                 json& summary) {
  auto roadmap = c.roadmap;
  if (!roadmap_path.empty()) {
    std::ifstream in(roadmap_path);
    if (!in) throw Error("config_missing", "cannot open roadmap file '" + roadmap_path + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error("config_parse", roadmap_path + ": " + e.what());
    }
    RunConfig tmp;
    apply_json(tmp, json{{"roadmap", j}});
    roadmap = tmp.roadmap;
  }
  Table t({"node", "cpp_nm", "mp_nm", "sram_area_um2", "tile_um2", "budget_cpp_x_mp"});
  std::vector<Series> s(1);
  s[0].label = "CPP x MP budget";
  for (std::size_t i = 0; i < roadmap.size(); ++i) {
    const auto& e = roadmap[i];
    long b = cross_node_budget(e);
    t.row() << e.node_label << e.cpp << e.mp << e.sram_area_um2 << e.cpp * e.mp * 1e-6 << b;
    summary["budget"][e.node_label] = b;
    s[0].x.push_back(static_cast<double>(i));
    s[0].y.push_back(static_cast<double>(b));
  }
  out.add("profile.csv", t.csv());
  if (want(g, c, "svg"))
    out.add("profile.svg", svg_lines(s, {640, 420, "Cross-node budget", "roadmap index", "tiles"}));
}

void cmd_retention(const Globals& g, const RunConfig& c, OutputSet& out, json& summary) {
  Table t({"retention_s", "delta_t_op", "delta_t_ref", "t_op_K", "t_ref_K", "error_rate"});
  for (double tr : c.retention.targets_s) {
    auto d = delta_from_retention({tr, c.retention.error_rate, c.retention.tau_0, c.retention.t_op, c.retention.t_ref});
    t.row() << tr << d.at_t_op << d.renormalized << c.retention.t_op << c.retention.t_ref << c.retention.error_rate;
    summary["delta"].push_back({{"retention_s", tr}, {"t_op", d.at_t_op}, {"t_ref", d.renormalized}});
  }
  out.add("retention.csv", t.csv());
  (void)g;
}

void cmd_switching(const Globals& g, const RunConfig& c, OutputSet& out, json& summary) {
  auto deltas = c.switching.deltas.empty() ? retention_deltas(c) : c.switching.deltas;
  auto rows = ic_curve(c.switching.tau_ns, deltas, c.stack, c.stack.t_ref);
  Table t({"tau_ns", "delta", "ic_uA"});
  std::vector<Series> s;
  for (const auto& r : rows) {
    t.row() << r.tau_ns << r.delta << r.ic_uA;
    if (s.empty() || s.back().label != "delta " + fmt_num(r.delta)) s.push_back({"delta " + fmt_num(r.delta), {}, {}});
    s.back().x.push_back(r.tau_ns);
    s.back().y.push_back(r.ic_uA);
  }
  summary["tau_d_ns"] = c.stack.tau_d;
  summary["tau_d_calibrated"] = true;
  summary["points"] = rows.size();
  out.add("switching.csv", t.csv());
  if (want(g, c, "svg"))
    out.add("switching.svg", svg_lines(s, {640, 420, "Critical switching current", "tau [ns]", "I_c [uA]"}));
}

void cmd_write(const Globals& g, const RunConfig& c, const Overrides& o, OutputSet& out, json& summary) {
  int rows = o.rows.value_or(c.write_targets.rows);
  Table t({"config", "rows", "corner", "bl_resistance_ohm", "sot_resistance_ohm", "nf", "nfin", "i_cell_uA"});
  std::vector<CellConfig> cfgs;
  if (!o.cell.empty()) cfgs = {parse_config(o.cell)};
  else cfgs = {CellConfig::RV2T1R, CellConfig::T1R1T, CellConfig::T1R1T_VGA, CellConfig::T1D1R};
  for (auto k : cfgs)
    for (auto corner : {Corner::ss, Corner::tt, Corner::ff}) {
      double i = write_current({k, rows, corner}, c.tech, c.finfet, c.write);
      t.row() << cfg_str(k) << rows << corner_str(corner) << bitline_resistance(k, rows, c.tech) << c.write.r_sot
              << c.write.nf[index_of(k)] << c.write.nfin[index_of(k)] << i * 1e6;
      summary["i_cell_uA"][cfg_str(k)][corner_str(corner)] = i * 1e6;
    }
  out.add("write.csv", t.csv());

  Corner corner = parse_corner(o.corner);
  auto deltas = retention_deltas(c);
  auto m = writability_vs_rows(c, cfgs, c.writability_rows, deltas, corner);
  std::vector<std::string> head = {"config", "rows", "corner", "i_cell_uA", "max_delta"};
  for (double d : deltas) head.push_back("meets_delta_" + fmt_num(d));
  Table w(head);
  std::vector<Series> s;
  for (const auto& x : m) {
    w.row() << cfg_str(x.config) << x.rows << corner_str(x.corner) << x.i_cell * 1e6 << x.max_delta;
    for (const auto& [d, ok] : x.meets) w << ok;
    if (s.empty() || s.back().label != cfg_str(x.config)) s.push_back({cfg_str(x.config), {}, {}});
    s.back().x.push_back(x.rows);
    s.back().y.push_back(x.i_cell * 1e6);
  }
  if (auto r = last_rows_where_exceeds(m, CellConfig::RV2T1R, CellConfig::T1D1R))
    summary["rv_beats_1d_up_to_rows"] = *r;
  else
    summary["rv_beats_1d_up_to_rows"] = nullptr;
  out.add("writability.csv", w.csv());
  if (want(g, c, "svg")) {
    MtjStack st = c.stack;
    for (double d : deltas) {
      st.delta = d;
      st.m_s = 0;
      double ic = critical_current(c.write.tau_write, st, st.t_ref, IcForm::thermal) * 1e6;
      s.push_back({"I_c delta " + fmt_num(d), {double(c.writability_rows.front()), double(c.writability_rows.back())},
                   {ic, ic}});
    }
    out.add("writability.svg",
            svg_lines(s, {640, 420, "I_cell (" + o.corner + ") vs rows", "rows", "current [uA]"}));
  }
}

ReadCase read_case_from(const RunConfig& c, const Overrides& o) {
  ReadCase rc;
  ReadPoint base = c.read_points.empty() ? ReadPoint{} : c.read_points.front();
  if (!o.cell.empty()) {
    rc.config = parse_config(o.cell);
    for (const auto& p : c.read_points)
      if (p.config == rc.config) {
        base = p;
        break;
      }
  } else {
    rc.config = base.config;
  }
  rc.selector = o.selector.empty() ? (base.config == rc.config ? base.selector : default_selector(rc.config))
                                   : parse_selector(o.selector);
  rc.rows = rc.cols = o.rows.value_or(128);
  rc.ra = o.ra.value_or(base.ra);
  rc.tmr = o.tmr.value_or(base.tmr);
  rc.v_read = o.vread.value_or(base.v_read);
  rc.vt_shift = o.vt_shift.value_or(base.vt_shift);
  return rc;
}

json sense_json(const ReadCase& rc, const SenseReport& r) {
  return {{"config", cfg_str(rc.config)},
          {"selector", std::string(to_string(rc.selector))},
          {"rows", rc.rows},
          {"ra_ohm_um2", rc.ra},
          {"tmr_pct", rc.tmr},
          {"v_read_V", rc.v_read},
          {"vt_shift_V", rc.vt_shift},
          {"feasible", r.feasible},
          {"latency_s", r.latency ? json(*r.latency) : json(nullptr)},
          {"sm_max_V", r.sm_max},
          {"i_dchg_A", r.i_dchg},
          {"sigma_i_sneak_A", r.sigma_i_sneak},
          {"ratio", r.ratio},
          {"r_sel_ohm", std::isfinite(r.r_sel) ? json(r.r_sel) : json(nullptr)},
          {"tmr_eff_pct", r.tmr_eff},
          {"energy_J",
           {{"column_overhead", r.energy.column_overhead},
            {"selector", r.energy.selector},
            {"rest", r.energy.rest},
            {"total", r.energy.total()}}},
          {"supply_energy_J", r.supply_energy},
          {"energy_balance_error", r.energy_error}};
}

void cmd_read(const Globals& g, const RunConfig& c, const Overrides& o, OutputSet& out, json& summary) {
  auto rc = read_case_from(c, o);
  auto r = sense(rc, c.tech, c.finfet, c.read);
  summary["read"] = sense_json(rc, r);
  Table s({"config", "selector", "rows", "ra_ohm_um2", "tmr_pct", "v_read_V", "vt_shift_V", "feasible", "latency_s",
           "sm_max_V", "i_dchg_A", "sigma_i_sneak_A", "ratio", "r_sel_ohm", "tmr_eff_pct", "e_column_J",
           "e_selector_J", "e_rest_J", "e_total_J"});
  s.row() << cfg_str(rc.config) << std::string(to_string(rc.selector)) << rc.rows << rc.ra << rc.tmr << rc.v_read
          << rc.vt_shift << r.feasible << (r.latency ? *r.latency : NAN) << r.sm_max << r.i_dchg << r.sigma_i_sneak
          << r.ratio << r.r_sel << r.tmr_eff << r.energy.column_overhead << r.energy.selector << r.energy.rest
          << r.energy.total();
  out.add("read.csv", s.csv());
  Table w({"t_s", "v_rl_p_V", "v_rl_ap_V", "sm_V", "i_dchg_p_A", "i_sneak_p_A"});
  for (std::size_t k = 0; k < r.t.size(); ++k)
    w.row() << r.t[k] << r.v_p[k] << r.v_ap[k] << r.sm[k] << r.i_dchg_p[k] << r.i_sneak_p[k];
  out.add("waveform.csv", w.csv());
  if (want(g, c, "json")) out.add("read.json", summary["read"].dump(2) + "\n");
  if (want(g, c, "svg")) {
    std::vector<double> tn;
    for (double t : r.t) tn.push_back(t * 1e9);
    out.add("waveform.svg", svg_lines({{"RL (P)", tn, r.v_p}, {"RL (AP)", tn, r.v_ap}, {"SM", tn, r.sm}},
                                      {640, 420, "Read line discharge", "t [ns]", "V"}));
  }
}

void cmd_sweep(const Globals& g, const RunConfig& c, const Overrides& o, OutputSet& out, json& summary) {
  SweepGrid grid;
  std::set<std::pair<int, int>> seen;
  for (const auto& p : c.read_points)
    if (seen.insert({int(index_of(p.config)), int(p.selector)}).second) grid.cells.push_back({p.config, p.selector});
  if (!o.cell.empty()) {
    auto k = parse_config(o.cell);
    grid.cells = {{k, o.selector.empty() ? default_selector(k) : parse_selector(o.selector)}};
  }
  grid.ra = c.sweep.ra;
  grid.tmr = c.sweep.tmr;
  grid.v_read = c.sweep.v_read;
  grid.vt_shift = c.sweep.vt_shift.empty() ? std::vector<double>{0.0} : c.sweep.vt_shift;
  grid.rows = c.sweep.rows.empty() ? std::vector<int>{o.rows.value_or(128)} : c.sweep.rows;
  grid.max_points = c.sweep.max_points;
  if (o.ra) grid.ra = {*o.ra};
  if (o.tmr) grid.tmr = {*o.tmr};
  if (o.vread) grid.v_read = {*o.vread};
  if (o.vt_shift) grid.vt_shift = {*o.vt_shift};
  if (o.rows) grid.rows = {*o.rows};

  Table t({"config", "selector", "rows", "ra_ohm_um2", "tmr_pct", "vt_shift_V", "v_read_V", "feasible",
           "min_vread_of_group", "latency_s", "sm_max_V", "i_dchg_A", "sigma_i_sneak_A", "ratio", "r_sel_ohm",
           "e_column_J", "e_selector_J", "e_rest_J", "e_total_J"});
  std::size_t feasible = 0;
  {
    // without explicit RA/TMR axes each named point is scanned over the V_read axis
    bool cartesian = !grid.ra.empty() && !grid.tmr.empty();
    if (grid.v_read.empty()) grid.v_read = vread_grid(0.5, 2.5, 0.1);
    std::vector<ReadRecord> recs;
    if (cartesian) {
      recs = read_design_space(c, grid, g.jobs);
    } else {
      auto pts = c.read_points;
      if (!o.cell.empty())
        std::erase_if(pts, [&](const ReadPoint& p) { return p.config != grid.cells.front().config; });
      auto cases = point_scan_cases(pts, grid.v_read, grid.rows.front());
      require(cases.size() <= grid.max_points, "invalid_grid", "sweep: too many points");
      recs = read_design_space(c, cases, g.jobs);
    }
    for (const auto& x : recs) {
      const auto& r = x.report;
      feasible += r.feasible;
      t.row() << cfg_str(x.rc.config) << std::string(to_string(x.rc.selector)) << x.rc.rows << x.rc.ra << x.rc.tmr
              << x.rc.vt_shift << x.rc.v_read << r.feasible << x.min_vread_of_group
              << (r.latency ? *r.latency : NAN) << r.sm_max << r.i_dchg << r.sigma_i_sneak << r.ratio << r.r_sel
              << r.energy.column_overhead << r.energy.selector << r.energy.rest << r.energy.total();
    }
    summary["grid_points"] = recs.size();
    summary["feasible_points"] = feasible;
  }
  out.add("design_space.csv", t.csv());

  // named design points: PPA join
  auto ppa = ppa_summary(c, c.read_points, o.rows.value_or(128), g.jobs);
  Table p({"name", "config", "selector", "area_um2", "unrealistic", "i_cell_tt_uA", "i_cell_ss_uA", "i_cell_ff_uA",
           "max_delta_ss", "retention_s", "v_read_V", "feasible", "latency_s", "sm_max_V", "i_dchg_A", "ratio",
           "r_sel_ohm", "tmr_eff_pct", "e_column_J", "e_selector_J", "e_rest_J", "e_total_J"});
  std::vector<std::string> cats;
  std::vector<std::vector<double>> stacks(3);
  std::vector<Series> scatter;
  for (const auto& x : ppa) {
    const auto& r = x.read;
    p.row() << x.name << cfg_str(x.config) << std::string(to_string(x.selector)) << x.area_um2 << x.unrealistic
            << x.i_cell[0] * 1e6 << x.i_cell[1] * 1e6 << x.i_cell[2] * 1e6 << x.max_delta_ss << x.retention_s
            << x.read_case.v_read << r.feasible << (r.latency ? *r.latency : NAN) << r.sm_max << r.i_dchg << r.ratio
            << r.r_sel << r.tmr_eff << r.energy.column_overhead << r.energy.selector << r.energy.rest
            << r.energy.total();
    summary["ppa"][x.name] = sense_json(x.read_case, r);
    cats.push_back(x.name);
    stacks[0].push_back(r.energy.column_overhead * 1e15);
    stacks[1].push_back(r.energy.selector * 1e15);
    stacks[2].push_back(r.energy.rest * 1e15);
    if (r.latency) scatter.push_back({x.name, {*r.latency * 1e9}, {r.energy.total() * 1e15}, true});
  }
  out.add("ppa.csv", p.csv());
  if (want(g, c, "json")) out.add("ppa.json", summary["ppa"].dump(2) + "\n");
  if (want(g, c, "svg")) {
    out.add("energy.svg", svg_stacked_bars(cats, {"column overhead", "selector", "rest"}, stacks,
                                           {720, 420, "Read energy breakdown", "", "energy [fJ]"}));
    out.add("latency_energy.svg",
            svg_lines(scatter, {640, 420, "Read latency vs energy", "latency [ns]", "energy [fJ]"}));
  }
}

void cmd_calibrate(const Globals& g, RunConfig c, bool selectors, std::optional<double> lat_target, OutputSet& out,
                   json& summary) {
  auto w = calibrate_finfet(c);
  apply(c, w);
  Table t({"config", "corner", "target_uA", "model_uA", "rel_error"});
  for (const auto& r : w.rows)
    t.row() << cfg_str(r.config) << corner_str(r.corner) << r.target * 1e6 << r.model * 1e6 << r.model / r.target - 1;
  summary["write"] = {{"worst_rel_error", w.worst_rel_error}, {"ratio_1d_rv_tt", w.ratio_1d_rv_tt},
                      {"ratio_1t_rv_ss", w.ratio_1t_rv_ss}, {"iterations", w.iterations},
                      {"seconds", w.seconds}, {"bl_resistance_per_length", w.bl_resistance_per_length}};
  out.add("calibration_write.csv", t.csv());

  if (selectors) {
    Table s({"selector", "residual", "value"});
    for (const auto& p : c.read_points) {
      if (p.selector == Selector::finfet || (p.selector == Selector::igzo && p.vt_shift != 0)) continue;
      SelectorTargets tg;
      tg.point.config = p.config;
      tg.point.selector = p.selector;
      tg.point.ra = p.ra;
      tg.point.tmr = p.tmr;
      tg.point.v_read = p.v_read;
      tg.point.vt_shift = p.vt_shift;
      tg.r_sel = p.ref_r_sel;
      tg.i_dchg = p.ref_i_dchg;
      tg.ratio = p.ref_ratio;
      tg.infeasible_at = p.v_read - 0.2;
      auto f = calibrate_selector(c, p.selector, tg);
      apply(c, f);
      for (const auto& [name, v] : f.residuals) s.row() << std::string(to_string(p.selector)) << name << v;
      summary["selectors"][std::string(to_string(p.selector))] = {
          {"cost", f.cost}, {"binding", f.binding}, {"r_sel_ohm", f.report.r_sel}, {"i_dchg_A", f.report.i_dchg},
          {"ratio", f.report.ratio}, {"sm_max_V", f.report.sm_max}};
    }
    out.add("calibration_selectors.csv", s.csv());
  }
  if (lat_target) {
    ReadCase ref;
    for (const auto& p : c.read_points)
      if (p.selector == Selector::igzo && p.vt_shift == 0) {
        ref.config = p.config, ref.selector = p.selector, ref.ra = p.ra, ref.tmr = p.tmr, ref.v_read = p.v_read;
      }
    auto lc = calibrate_line_cap(c, ref, *lat_target);
    c.read.line_cap_per_cell = lc.line_cap_per_cell;
    summary["line_cap_per_cell_fF"] = lc.line_cap_per_cell * 1e15;
  }
  json fitted = fitted_json(c);
  fitted["read"]["line_cap_per_cell_fF"] = c.read.line_cap_per_cell * 1e15;
  out.add("fitted.json", fitted.dump(2) + "\n");
  (void)g;
}

void cmd_dump_iv(const RunConfig& c, const std::string& device, double v0, double v1, int n, double vgs,
                 const std::string& corner, double vt_shift, OutputSet& out, json& summary) {
  require(n >= 2 && v1 > v0, "invalid_argument", "dump-iv: need --points >= 2 and --vmax > --vmin");
  Table t({"v_V", "i_A"});
  std::function<double(double)> f;
  if (device == "finfet") {
    Corner k = parse_corner(corner);
    f = [&, k](double v) { return finfet_current(c.finfet, vgs, v, k); };
  } else if (device == "igzo") {
    auto m = c.read.igzo.shifted(vt_shift);
    f = [m, vgs](double v) { return igzo_current(m, vgs, v); };
  } else if (device == "tunnel") {
    f = [&](double v) { return diode_current(c.read.tunnel, v); };
  } else if (device == "schottky") {
    f = [&](double v) { return diode_current(c.read.schottky, v); };
  } else {
    throw Error("invalid_argument", "dump-iv: unknown device '" + device + "'");
  }
  for (int k = 0; k < n; ++k) {
    double v = v0 + (v1 - v0) * k / (n - 1);
    t.row() << v << f(v);
  }
  summary["device"] = device;
  summary["points"] = n;
  out.add("iv_" + device + ".csv", t.csv());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SOT-MRAM bitcell design-technology exploration"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Globals g;
  Overrides o;
  app.add_option("--config", g.config, "JSON config (default: $" + std::string(kConfigEnv) + " or built-in)");
  app.add_option("--out", g.out, "output directory (default: config output.dir)");
  app.add_option("--format", g.formats, "csv|json|svg (csv is always written)")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json", "svg"}));
  app.add_option("--jobs", g.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  auto add_case_opts = [&](CLI::App* s) {
    s->add_option("--rows", o.rows, "array rows")->check(CLI::PositiveNumber);
    s->add_option("--cell", o.cell, "cell configuration");
  };

  auto* area = app.add_subcommand("area", "bitcell area and via aspect ratios");
  std::string roadmap;
  auto* profile = app.add_subcommand("profile", "cross-node CPP x MP budget");
  profile->add_option("--roadmap", roadmap, "roadmap JSON array (default: config roadmap)");
  auto* retention = app.add_subcommand("retention", "retention to thermal stability conversion");
  auto* switching = app.add_subcommand("switching", "critical current versus pulse width");
  auto* write = app.add_subcommand("write", "write current per config and corner, writability vs rows");
  add_case_opts(write);
  write->add_option("--corner", o.corner, "corner for the writability matrix")
      ->check(CLI::IsMember({"tt", "ss", "ff"}));
  auto* read = app.add_subcommand("read", "single sensing run with waveform dump");
  auto* sweep = app.add_subcommand("sweep", "read design-space grid and PPA summary");
  for (auto* s : {read, sweep}) {
    add_case_opts(s);
    s->add_option("--selector", o.selector, "read selector");
    s->add_option("--vread", o.vread, "read voltage [V]");
    s->add_option("--ra", o.ra, "MTJ RA [ohm um^2]");
    s->add_option("--tmr", o.tmr, "MTJ TMR [%]");
    s->add_option("--vt-shift", o.vt_shift, "IGZO threshold shift from as-is [V]");
  }
  auto* calibrate = app.add_subcommand("calibrate", "fit model parameters and write fitted.json");
  bool fit_selectors = false;
  std::optional<double> lat_target;
  calibrate->add_flag("--selectors", fit_selectors, "also refit the BEOL selectors (slow)");
  calibrate->add_option("--latency-target", lat_target, "refit line cap so the as-is IGZO point senses at this [s]");
  auto* devices = app.add_subcommand("devices", "device model utilities");
  devices->require_subcommand(1);
  auto* dump = devices->add_subcommand("dump-iv", "I-V sweep of one device model");
  std::string device = "tunnel", corner = "tt";
  double vmin = -2, vmax = 2, vgs = 0.8, vt_shift = 0;
  int points = 201;
  dump->add_option("--device", device, "finfet|igzo|tunnel|schottky");
  dump->add_option("--vmin", vmin);
  dump->add_option("--vmax", vmax);
  dump->add_option("--points", points);
  dump->add_option("--vgs", vgs, "gate voltage for transistors [V]");
  dump->add_option("--corner", corner);
  dump->add_option("--vt-shift", vt_shift);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    json err = {{"error", {{"code", "usage"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 2;
  }

  try {
    RunConfig c = load(g);
    OutputSet out;
    json summary;
    std::string name;
    if (*area) cmd_area(g, c, out, summary), name = "area";
    else if (*profile) cmd_profile(g, c, roadmap, out, summary), name = "profile";
    else if (*retention) cmd_retention(g, c, out, summary), name = "retention";
    else if (*switching) cmd_switching(g, c, out, summary), name = "switching";
    else if (*write) cmd_write(g, c, o, out, summary), name = "write";
    else if (*read) cmd_read(g, c, o, out, summary), name = "read";
    else if (*sweep) cmd_sweep(g, c, o, out, summary), name = "sweep";
    else if (*calibrate) cmd_calibrate(g, c, fit_selectors, lat_target, out, summary), name = "calibrate";
    else if (*dump) cmd_dump_iv(c, device, vmin, vmax, points, vgs, corner, vt_shift, out, summary), name = "dump-iv";
    if (want(g, c, "json") && !out.files().count(name + ".json"))
      out.add(name + ".json", summary.dump(2) + "\n");
    std::string dir = g.out.empty() ? c.output_dir : g.out;
    out.commit(dir);
    json ok = {{"command", name}, {"out", dir}, {"files", json::array()}, {"summary", summary}};
    for (const auto& [f, body] : out.files()) ok["files"].push_back(f);
    std::cout << ok.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    json err = {{"error", {{"code", e.code()}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    json err = {{"error", {{"code", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}

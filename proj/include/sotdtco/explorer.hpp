#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "arraysim.hpp"
#include "config.hpp"

namespace sotdtco {

/// Runs f(i) for i in [0, n) on up to `jobs` threads. Results must be written by index.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(mu);
          if (!err) err = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

// ---------------------------------------------------------------------------
// Read design space

struct CellSelector {
  CellConfig config;
  Selector selector;
};

struct SweepGrid {
  std::vector<CellSelector> cells;
  std::vector<double> ra, tmr, v_read, vt_shift;
  std::vector<int> rows = {128};
  std::size_t max_points = 20000;

  std::size_t size() const {
    return cells.size() * ra.size() * tmr.size() * v_read.size() * vt_shift.size() * rows.size();
  }
  void validate() const {
    require(!cells.empty() && !ra.empty() && !tmr.empty() && !v_read.empty() && !vt_shift.empty() && !rows.empty(),
            "invalid_grid", "sweep grid: every axis needs at least one value");
    require(size() <= max_points, "invalid_grid",
            "sweep grid: " + std::to_string(size()) + " points exceeds cap " + std::to_string(max_points));
  }
  std::vector<ReadCase> cases() const {
    std::vector<ReadCase> out;
    out.reserve(size());
    for (const auto& c : cells)
      for (int r : rows)
        for (double a : ra)
          for (double t : tmr)
            for (double s : vt_shift)
              for (double v : v_read) {
                ReadCase rc;
                rc.config = c.config;
                rc.selector = c.selector;
                rc.rows = r;
                rc.cols = r;
                rc.ra = a;
                rc.tmr = t;
                rc.vt_shift = c.selector == Selector::igzo ? s : 0.0;
                rc.v_read = v;
                out.push_back(rc);
              }
    // vt_shift only matters for IGZO; drop duplicates it creates elsewhere
    auto key = [](const ReadCase& r) {
      return std::make_tuple(index_of(r.config), static_cast<int>(r.selector), r.rows, r.ra, r.tmr, r.vt_shift,
                             r.v_read);
    };
    std::stable_sort(out.begin(), out.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
    out.erase(std::unique(out.begin(), out.end(), [&](auto& a, auto& b) { return key(a) == key(b); }), out.end());
    return out;
  }
};

struct ReadRecord {
  ReadCase rc;
  SenseReport report;
  bool min_vread_of_group = false;
};

/// Group key: everything but the read voltage.
inline auto read_group_key(const ReadCase& r) {
  return std::make_tuple(index_of(r.config), static_cast<int>(r.selector), r.rows, r.ra, r.tmr, r.vt_shift);
}

inline std::vector<ReadRecord> read_design_space(const RunConfig& cfg, const std::vector<ReadCase>& cases,
                                                 unsigned jobs = 1, bool keep_traces = false) {
  std::vector<ReadRecord> out(cases.size());
  parallel_for(cases.size(), jobs, [&](std::size_t i) {
    out[i].rc = cases[i];
    out[i].report = sense(cases[i], cfg.tech, cfg.finfet, cfg.read);
    if (!keep_traces) {
      auto& r = out[i].report;
      r.t.clear(), r.v_p.clear(), r.v_ap.clear(), r.sm.clear(), r.i_dchg_p.clear(), r.i_sneak_p.clear();
    }
  });
  std::map<decltype(read_group_key(ReadCase{})), std::size_t> best;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out[i].report.feasible) continue;
    auto k = read_group_key(out[i].rc);
    auto it = best.find(k);
    if (it == best.end() || out[i].rc.v_read < out[it->second].rc.v_read) best[k] = i;
  }
  for (auto& [k, i] : best) out[i].min_vread_of_group = true;
  return out;
}

inline std::vector<ReadRecord> read_design_space(const RunConfig& cfg, const SweepGrid& grid, unsigned jobs = 1,
                                                 bool keep_traces = false) {
  grid.validate();
  return read_design_space(cfg, grid.cases(), jobs, keep_traces);
}

/// Each named point scanned over a read-voltage grid at its own RA, TMR and threshold shift.
inline std::vector<ReadCase> point_scan_cases(const std::vector<ReadPoint>& points, const std::vector<double>& v_read,
                                              int rows = 128) {
  std::vector<ReadCase> out;
  for (const auto& p : points)
    for (double v : v_read) {
      ReadCase rc;
      rc.config = p.config;
      rc.selector = p.selector;
      rc.rows = rc.cols = rows;
      rc.ra = p.ra;
      rc.tmr = p.tmr;
      rc.vt_shift = p.vt_shift;
      rc.v_read = v;
      out.push_back(rc);
    }
  return out;
}

/// Minimal feasible V_read for one design point on an explicit voltage grid.
inline std::optional<double> min_feasible_vread(const RunConfig& cfg, ReadCase rc, const std::vector<double>& grid,
                                                unsigned jobs = 1) {
  SweepGrid g;
  g.cells = {{rc.config, rc.selector}};
  g.ra = {rc.ra};
  g.tmr = {rc.tmr};
  g.vt_shift = {rc.vt_shift};
  g.rows = {rc.rows};
  g.v_read = grid;
  for (const auto& r : read_design_space(cfg, g, jobs))
    if (r.min_vread_of_group) return r.rc.v_read;
  return std::nullopt;
}

inline std::vector<double> vread_grid(double lo, double hi, double step) {
  require(step > 0 && hi >= lo, "invalid_grid", "v_read grid: need step > 0 and hi >= lo");
  std::vector<double> v;
  for (long k = 0;; ++k) {
    double x = std::round((lo + k * step) * 1e6) / 1e6;
    if (x > hi + 1e-9) break;
    v.push_back(x);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Writability versus subarray size

struct WritabilityCell {
  CellConfig config;
  int rows;
  Corner corner;
  double i_cell;
  std::vector<std::pair<double, bool>> meets;  // (delta, passes)
  double max_delta;                            // largest delta the current can switch
};

/// Renormalized (t_ref) barrier for each retention target of the config.
inline std::vector<double> retention_deltas(const RunConfig& cfg) {
  std::vector<double> d;
  for (double tr : cfg.retention.targets_s)
    d.push_back(delta_from_retention({tr, cfg.retention.error_rate, cfg.retention.tau_0, cfg.retention.t_op,
                                      cfg.retention.t_ref})
                    .renormalized);
  return d;
}

inline std::vector<WritabilityCell> writability_vs_rows(const RunConfig& cfg, const std::vector<CellConfig>& configs,
                                                        const std::vector<int>& rows,
                                                        const std::vector<double>& deltas, Corner corner) {
  std::vector<WritabilityCell> out;
  for (auto c : configs)
    for (int r : rows) {
      WriteCase wc{c, r, corner};
      auto f = write_feasibility(wc, cfg.tech, cfg.finfet, cfg.write, cfg.stack, deltas);
      double md = max_delta_for_current(f.i_cell, cfg.write.tau_write, cfg.stack, cfg.stack.t_ref);
      out.push_back({c, r, corner, f.i_cell, f.meets, md});
    }
  return out;
}

/// Largest row count in `rows` where a's current exceeds b's.
inline std::optional<int> last_rows_where_exceeds(const std::vector<WritabilityCell>& m, CellConfig a, CellConfig b) {
  std::optional<int> last;
  for (const auto& x : m) {
    if (x.config != a) continue;
    for (const auto& y : m)
      if (y.config == b && y.rows == x.rows && x.i_cell > y.i_cell) last = std::max(last.value_or(0), x.rows);
  }
  return last;
}

// ---------------------------------------------------------------------------
// PPA summary

struct PpaRecord {
  std::string name;
  CellConfig config;
  Selector selector;
  double area_um2;
  bool unrealistic;
  std::array<double, 3> i_cell;  // tt, ss, ff
  double max_delta_ss;           // renormalized barrier the ss current can switch
  double retention_s;            // attainable retention at t_op
  ReadCase read_case;
  SenseReport read;
};

inline std::vector<PpaRecord> ppa_summary(const RunConfig& cfg, const std::vector<ReadPoint>& points, int rows = 128,
                                          unsigned jobs = 1) {
  std::vector<PpaRecord> out(points.size());
  parallel_for(points.size(), jobs, [&](std::size_t i) {
    const auto& p = points[i];
    PpaRecord r;
    r.name = p.name;
    r.config = p.config;
    r.selector = p.selector;
    auto g = bitcell_geometry(p.config, cfg.tech);
    r.area_um2 = g.area_um2;
    r.unrealistic = g.unrealistic;
    for (int k = 0; k < 3; ++k)
      r.i_cell[k] = write_current({p.config, rows, static_cast<Corner>(k)}, cfg.tech, cfg.finfet, cfg.write);
    r.max_delta_ss = max_delta_for_current(r.i_cell[1], cfg.write.tau_write, cfg.stack, cfg.stack.t_ref);
    double d_op = r.max_delta_ss * cfg.retention.t_ref / cfg.retention.t_op;
    r.retention_s = retention_from_delta(d_op, cfg.retention.error_rate, cfg.retention.tau_0);
    ReadCase rc;
    rc.config = p.config;
    rc.selector = p.selector;
    rc.rows = rows;
    rc.cols = rows;
    rc.ra = p.ra;
    rc.tmr = p.tmr;
    rc.v_read = p.v_read;
    rc.vt_shift = p.vt_shift;
    r.read_case = rc;
    r.read = sense(rc, cfg.tech, cfg.finfet, cfg.read);
    auto& s = r.read;
    s.t.clear(), s.v_p.clear(), s.v_ap.clear(), s.sm.clear(), s.i_dchg_p.clear(), s.i_sneak_p.clear();
    out[i] = std::move(r);
  });
  return out;
}

}  // namespace sotdtco

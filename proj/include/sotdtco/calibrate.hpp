#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include "arraysim.hpp"
#include "config.hpp"

namespace sotdtco {

// ---------------------------------------------------------------------------
// Write path: FinFET drive, corner thresholds and per-config access resistance

struct WriteFitResult {
  FinFetModel fet;
  WriteSetup write;
  double bl_resistance_per_length = 0;
  double worst_rel_error = 0;
  double ratio_1d_rv_tt = 0;
  double ratio_1t_rv_ss = 0;
  int iterations = 0;
  double seconds = 0;
  struct Row {
    CellConfig config;
    Corner corner;
    double target;
    double model;
  };
  std::vector<Row> rows;
};

namespace detail {

// free parameters: g_ref (log), vt_ss, vt_ff, r_access for RV, 1T1R1T, VGA
struct WriteFitCtx {
  const RunConfig* cfg;
  TechNode tech;
  FinFetModel fet;
  WriteSetup write;
};

inline void unpack_write(const gsl_vector* x, WriteFitCtx& c) {
  c.fet.g_ref = std::exp(gsl_vector_get(x, 0));
  c.fet.vt[1] = gsl_vector_get(x, 1);
  c.fet.vt[2] = gsl_vector_get(x, 2);
  c.write.r_access[index_of(CellConfig::RV2T1R)] = std::abs(gsl_vector_get(x, 3));
  c.write.r_access[index_of(CellConfig::T1R1T)] = std::abs(gsl_vector_get(x, 4));
  c.write.r_access[index_of(CellConfig::T1R1T_VGA)] = std::abs(gsl_vector_get(x, 5));
  // the flagpole cell shares the RV write path
  c.write.r_access[index_of(CellConfig::FV2T1R)] = c.write.r_access[index_of(CellConfig::RV2T1R)];
}

inline double model_icell(const WriteFitCtx& c, CellConfig cfg, Corner k) {
  return write_current({cfg, c.cfg->write_targets.rows, k}, c.tech, c.fet, c.write);
}

inline const std::array<double, 3>* target_of(const WriteTargets& t, CellConfig c) {
  for (const auto& [cfg, v] : t.i_cell)
    if (cfg == c) return &v;
  return nullptr;
}

inline int write_residuals(const gsl_vector* x, void* p, gsl_vector* f) {
  auto& c = *static_cast<WriteFitCtx*>(p);
  unpack_write(x, c);
  const auto& tg = c.cfg->write_targets;
  std::size_t k = 0;
  if (!(c.fet.vt[1] > c.fet.vt[0] && c.fet.vt[0] > c.fet.vt[2] && c.fet.vt[1] < c.fet.v_gref)) {
    for (std::size_t i = 0; i < f->size; ++i) gsl_vector_set(f, i, 10.0);
    return GSL_SUCCESS;
  }
  for (const auto& [cfg, v] : tg.i_cell)
    for (int corner = 0; corner < 3; ++corner)
      gsl_vector_set(f, k++, model_icell(c, cfg, static_cast<Corner>(corner)) / v[corner] - 1);
  double rv_tt = model_icell(c, CellConfig::RV2T1R, Corner::tt);
  double rv_ss = model_icell(c, CellConfig::RV2T1R, Corner::ss);
  double d_tt = model_icell(c, CellConfig::T1D1R, Corner::tt);
  double d_ss = model_icell(c, CellConfig::T1D1R, Corner::ss);
  double t_ss = model_icell(c, CellConfig::T1R1T, Corner::ss);
  gsl_vector_set(f, k++, d_tt / rv_tt - tg.ratio_1d_rv_tt);
  gsl_vector_set(f, k++, t_ss / rv_ss - tg.ratio_1t_rv_ss);
  // 1T1D1R must not drop below 2T1R-RV at the slow corner
  double hinge = tg.require_1d_ge_rv_ss ? std::max(0.0, 1.001 - d_ss / rv_ss) * 10 : 0.0;
  gsl_vector_set(f, k++, hinge);
  return GSL_SUCCESS;
}

}  // namespace detail

/** \brief Fits the write path to per-config, per-corner I_cell targets.
 *
 *  The bitline constant comes from the BL resistance targets first (minimax),
 *  then a trust-region least squares adjusts the FinFET linear drive, the ss/ff
 *  thresholds and three access resistances. isat_ref and vt_tt stay fixed.
 */
inline WriteFitResult calibrate_finfet(const RunConfig& cfg, int max_iter = 200) {
  auto t0 = std::chrono::steady_clock::now();
  const auto& tg = cfg.write_targets;
  require(!tg.i_cell.empty(), "calibration_targets", "calibrate_finfet: no I_cell targets");
  require(detail::target_of(tg, CellConfig::RV2T1R) && detail::target_of(tg, CellConfig::T1D1R) &&
              detail::target_of(tg, CellConfig::T1R1T),
          "calibration_targets", "calibrate_finfet: need 2T1R-RV, 1T1R1T and 1T1D1R targets");

  detail::WriteFitCtx ctx{&cfg, cfg.tech, cfg.finfet, cfg.write};
  if (!tg.bl.empty()) ctx.tech.bl_resistance_per_length = fit_bl_resistance_per_length(tg.bl, tg.rows, cfg.tech);

  const std::size_t n_par = 6;
  const std::size_t n_res = tg.i_cell.size() * 3 + 3;
  gsl_vector* x = gsl_vector_alloc(n_par);
  gsl_vector_set(x, 0, std::log(ctx.fet.g_ref));
  gsl_vector_set(x, 1, ctx.fet.vt[1]);
  gsl_vector_set(x, 2, ctx.fet.vt[2]);
  gsl_vector_set(x, 3, ctx.write.r_access[index_of(CellConfig::RV2T1R)]);
  gsl_vector_set(x, 4, ctx.write.r_access[index_of(CellConfig::T1R1T)]);
  gsl_vector_set(x, 5, ctx.write.r_access[index_of(CellConfig::T1R1T_VGA)]);

  gsl_multifit_nlinear_fdf fdf{};
  fdf.f = detail::write_residuals;
  fdf.df = nullptr;
  fdf.n = n_res;
  fdf.p = n_par;
  fdf.params = &ctx;
  auto params = gsl_multifit_nlinear_default_parameters();
  params.h_df = 1e-6;
  auto* w = gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &params, n_res, n_par);
  gsl_multifit_nlinear_init(x, &fdf, w);
  int info = 0;
  int status = gsl_multifit_nlinear_driver(max_iter, 1e-10, 1e-10, 1e-12, nullptr, nullptr, &info, w);
  WriteFitResult out;
  out.iterations = static_cast<int>(gsl_multifit_nlinear_niter(w));
  detail::unpack_write(w->x, ctx);
  gsl_multifit_nlinear_free(w);
  gsl_vector_free(x);
  require(status == GSL_SUCCESS || status == GSL_EMAXITER, "calibration_nonconvergence",
          std::string("calibrate_finfet: ") + gsl_strerror(status));

  out.fet = ctx.fet;
  out.write = ctx.write;
  out.bl_resistance_per_length = ctx.tech.bl_resistance_per_length;
  for (const auto& [c, v] : tg.i_cell)
    for (int k = 0; k < 3; ++k) {
      double m = detail::model_icell(ctx, c, static_cast<Corner>(k));
      out.rows.push_back({c, static_cast<Corner>(k), v[k], m});
      out.worst_rel_error = std::max(out.worst_rel_error, std::abs(m / v[k] - 1));
    }
  out.ratio_1d_rv_tt = detail::model_icell(ctx, CellConfig::T1D1R, Corner::tt) /
                       detail::model_icell(ctx, CellConfig::RV2T1R, Corner::tt);
  out.ratio_1t_rv_ss = detail::model_icell(ctx, CellConfig::T1R1T, Corner::ss) /
                       detail::model_icell(ctx, CellConfig::RV2T1R, Corner::ss);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline void apply(RunConfig& cfg, const WriteFitResult& r) {
  cfg.finfet = r.fet;
  cfg.write = r.write;
  cfg.tech.bl_resistance_per_length = r.bl_resistance_per_length;
}

// ---------------------------------------------------------------------------
// Read selectors

struct SelectorTargets {
  ReadCase point;
  double r_sel = 0;       // ohm
  double i_dchg = 0;      // A
  double ratio = 0;
  double sm_floor = 0.103;
  std::optional<double> infeasible_at;  // V_read at which the point must not sense
  int max_iter = 300;
};

struct SelectorFit {
  Selector kind;
  DiodeModel diode;
  IgzoFetModel igzo;
  double cost = 0;
  int iterations = 0;
  SenseReport report;
  std::string binding;  // name of the worst remaining residual
  std::vector<std::pair<std::string, double>> residuals;
};

namespace detail {

struct SelectorCtx {
  const RunConfig* cfg;
  const SelectorTargets* tg;
  Selector kind;
  ReadSetup base;
  DiodeModel diode0;
};

// diodes: log i0, log v0 (tunnel) / log i0, log vf, log g (schottky); igzo: log ss, log ispec, log i_on, dibl
inline ReadSetup selector_setup(const SelectorCtx& c, const gsl_vector* x) {
  ReadSetup rs = c.base;
  auto g = [&](std::size_t i) { return gsl_vector_get(x, i); };
  switch (c.kind) {
    case Selector::tunnel:
      rs.tunnel.i_0 = std::exp(g(0));
      rs.tunnel.v_0_fwd = rs.tunnel.v_0_rev = std::exp(g(1));
      break;
    case Selector::schottky:
      rs.schottky.i_0 = std::exp(g(0));
      rs.schottky.v_0_fwd = std::exp(g(1));
      rs.schottky.perimeter_leak_g = std::exp(g(2));
      break;
    case Selector::igzo:
      rs.igzo.ss = std::exp(g(0));
      rs.igzo.ispec_per_um = std::exp(g(1));
      rs.igzo.i_on_per_um = std::exp(g(2));
      rs.igzo.dibl = g(3);
      break;
    case Selector::finfet:
      break;
  }
  return rs;
}

inline std::vector<std::pair<std::string, double>> selector_residuals(const SelectorCtx& c, const ReadSetup& rs,
                                                                      SenseReport* keep) {
  std::vector<std::pair<std::string, double>> r;
  const auto& tg = *c.tg;
  auto rep = sense(tg.point, c.cfg->tech, c.cfg->finfet, rs);
  auto hinge = [](double z) { return z > 0 ? z : 0.0; };
  r.emplace_back("sm_floor", hinge(tg.sm_floor - rep.sm_max) * 300);
  if (tg.infeasible_at) {
    ReadCase low = tg.point;
    low.v_read = *tg.infeasible_at;
    auto l = sense(low, c.cfg->tech, c.cfg->finfet, rs);
    r.emplace_back("infeasible_below", hinge(l.sm_max - (2 * rs.sense_threshold - tg.sm_floor)) * 300);
  }
  if (tg.i_dchg > 0) r.emplace_back("i_dchg", std::log(rep.i_dchg / tg.i_dchg) * 10);
  if (tg.r_sel > 0) r.emplace_back("r_sel", std::isfinite(rep.r_sel) ? std::log(rep.r_sel / tg.r_sel) * 10 : 100.0);
  if (tg.ratio > 0) r.emplace_back("ratio", std::log(rep.ratio / tg.ratio) * 3);
  if (keep) *keep = std::move(rep);
  return r;
}

inline double selector_cost(const gsl_vector* x, void* p) {
  auto& c = *static_cast<SelectorCtx*>(p);
  ReadSetup rs = selector_setup(c, x);
  try {
    rs.validate();
    double s = 0;
    for (const auto& [name, v] : selector_residuals(c, rs, nullptr)) s += v * v;
    return s;
  } catch (const Error&) {
    return 1e6;
  }
}

}  // namespace detail

/** \brief Fits a BEOL selector so its sensed chord resistance, discharge current
 *  and sneak ratio at a design point match the targets, while keeping the point
 *  feasible. Deterministic Nelder-Mead from the configured parameters.
 */
inline SelectorFit calibrate_selector(const RunConfig& cfg, Selector kind, const SelectorTargets& tg) {
  require(kind != Selector::finfet, "calibration_targets", "calibrate_selector: finfet is fitted on the write path");
  detail::SelectorCtx ctx{&cfg, &tg, kind, cfg.read, {}};
  std::vector<double> x0;
  switch (kind) {
    case Selector::tunnel:
      x0 = {std::log(cfg.read.tunnel.i_0), std::log(cfg.read.tunnel.v_0_fwd)};
      break;
    case Selector::schottky:
      x0 = {std::log(cfg.read.schottky.i_0), std::log(cfg.read.schottky.v_0_fwd),
            std::log(std::max(cfg.read.schottky.perimeter_leak_g, 1e-15))};
      break;
    default:
      x0 = {std::log(cfg.read.igzo.ss), std::log(cfg.read.igzo.ispec_per_um), std::log(cfg.read.igzo.i_on_per_um),
            cfg.read.igzo.dibl};
  }
  const std::size_t n = x0.size();
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x, i, x0[i]);
    gsl_vector_set(step, i, kind == Selector::igzo && i == 3 ? 0.02 : 0.1);
  }
  gsl_multimin_function f{detail::selector_cost, n, &ctx};
  auto* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(m, &f, x, step);
  SelectorFit out;
  out.kind = kind;
  for (int it = 0; it < tg.max_iter; ++it) {
    if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
    out.iterations = it + 1;
    if (gsl_multimin_fminimizer_size(m) < 1e-4) break;
  }
  ReadSetup best = detail::selector_setup(ctx, m->x);
  out.cost = m->fval;
  gsl_multimin_fminimizer_free(m);
  gsl_vector_free(x);
  gsl_vector_free(step);

  out.diode = kind == Selector::tunnel ? best.tunnel : best.schottky;
  out.igzo = best.igzo;
  out.residuals = detail::selector_residuals(ctx, best, &out.report);
  double worst = -1;
  for (const auto& [name, v] : out.residuals)
    if (std::abs(v) > worst) {
      worst = std::abs(v);
      out.binding = name;
    }
  if (!out.report.feasible)
    throw Error("calibration_infeasible", "calibrate_selector(" + std::string(to_string(kind)) +
                                              "): target point cannot sense; binding constraint: " + out.binding);
  return out;
}

inline void apply(RunConfig& cfg, const SelectorFit& f) {
  if (f.kind == Selector::tunnel) cfg.read.tunnel = f.diode;
  if (f.kind == Selector::schottky) cfg.read.schottky = f.diode;
  if (f.kind == Selector::igzo) cfg.read.igzo = f.igzo;
}

// ---------------------------------------------------------------------------
// Line capacitance: latency scales with the column capacitance

struct LineCapFit {
  double line_cap_per_cell;  // F
  double latency;            // s, at the reference point
};

/// Bracketed root find on log(latency / target) over log(line cap).
inline LineCapFit calibrate_line_cap(const RunConfig& cfg, const ReadCase& point, double target_latency) {
  require(target_latency > 0 && target_latency < cfg.read.window, "calibration_targets",
          "calibrate_line_cap: target latency must lie inside the sensing window");
  auto lat = [&](double log_c) {
    ReadSetup rs = cfg.read;
    rs.line_cap_per_cell = std::exp(log_c);
    auto r = sense(point, cfg.tech, cfg.finfet, rs);
    require(r.latency.has_value(), "calibration_infeasible", "calibrate_line_cap: reference point cannot sense");
    return std::log(*r.latency / target_latency);
  };
  double a = std::log(cfg.read.line_cap_per_cell) - 0.5, b = a + 1.0;
  double fa = lat(a), fb = lat(b);
  for (int k = 0; k < 8 && fa * fb > 0; ++k) {
    if (fa > 0) {
      b = a, fb = fa;
      a -= 1.0, fa = lat(a);
    } else {
      a = b, fa = fb;
      b += 1.0, fb = lat(b);
    }
  }
  require(fa * fb <= 0, "calibration_nonconvergence", "calibrate_line_cap: could not bracket the target latency");
  std::uintmax_t iters = 40;
  auto res = boost::math::tools::toms748_solve(lat, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(30),
                                               iters);
  double c = std::exp(0.5 * (res.first + res.second));
  ReadSetup rs = cfg.read;
  rs.line_cap_per_cell = c;
  return {c, *sense(point, cfg.tech, cfg.finfet, rs).latency};
}

}  // namespace sotdtco

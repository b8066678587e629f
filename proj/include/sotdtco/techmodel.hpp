#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace sotdtco {

enum class CellConfig { FV2T1R = 0, RV2T1R, T1R1T, T1R1T_VGA, T1D1R };

inline constexpr std::array<CellConfig, 5> kAllConfigs = {
    CellConfig::FV2T1R, CellConfig::RV2T1R, CellConfig::T1R1T,
    CellConfig::T1R1T_VGA, CellConfig::T1D1R};

inline std::string_view to_string(CellConfig c) {
  switch (c) {
    case CellConfig::FV2T1R: return "2T1R-FV";
    case CellConfig::RV2T1R: return "2T1R-RV";
    case CellConfig::T1R1T: return "1T1R1T";
    case CellConfig::T1R1T_VGA: return "1T1R1T-VGA";
    case CellConfig::T1D1R: return "1T1D1R";
  }
  return "?";
}

inline CellConfig parse_config(std::string_view s) {
  for (auto c : kAllConfigs)
    if (to_string(c) == s) return c;
  // short aliases used on the command line
  if (s == "FV") return CellConfig::FV2T1R;
  if (s == "RV" || s == "2T1R") return CellConfig::RV2T1R;
  if (s == "VGA") return CellConfig::T1R1T_VGA;
  throw Error("unknown_config", "unknown cell configuration '" + std::string(s) + "'");
}

inline std::size_t index_of(CellConfig c) { return static_cast<std::size_t>(c); }

struct TechNode {
  std::string node_label = "N7";
  double cpp = 56.0;   // nm
  double mp = 40.0;    // nm
  double fp = 30.0;    // nm
  double bl_resistance_per_length = 0.0593;  // ohm/nm
  double line_width_m2 = 25.0;               // nm
  double rv_landing_depth = 62.5;            // nm, stairwise via landing
  double sram_target_um2 = 0.021;            // benchmark bitcell area
  // per-config grid dimensions, indexed by CellConfig
  std::array<int, 5> width_cpp = {2, 4, 3, 3, 2};
  std::array<int, 5> height_mp = {4, 4, 5, 4, 4};

  void validate() const {
    require(cpp > 0 && mp > 0 && fp > 0, "invalid_tech", "tech: lengths must be positive");
    require(cpp >= mp, "invalid_tech", "tech: cpp must be >= mp");
    require(bl_resistance_per_length > 0, "invalid_tech", "tech: bl_resistance_per_length must be positive");
    require(line_width_m2 > 0 && rv_landing_depth > 0, "invalid_tech", "tech: line width and landing depth must be positive");
    for (int w : width_cpp) require(w >= 1, "invalid_tech", "tech: width_cpp must be >= 1");
    for (int h : height_mp) require(h >= 1, "invalid_tech", "tech: height_mp must be >= 1");
  }
};

struct CellGeometry {
  CellConfig config;
  int width_cpp;
  int height_mp;
  double width_nm;
  double height_nm;
  double area_um2;
  bool meets_sram_target;
  bool unrealistic;  // flagpole via, kept for comparison only
};

inline CellGeometry bitcell_geometry(CellConfig c, const TechNode& t) {
  CellGeometry g{};
  g.config = c;
  g.width_cpp = t.width_cpp[index_of(c)];
  g.height_mp = t.height_mp[index_of(c)];
  g.width_nm = g.width_cpp * t.cpp;
  g.height_nm = g.height_mp * t.mp;
  g.area_um2 = g.width_nm * g.height_nm * 1e-6;
  g.meets_sram_target = g.area_um2 <= t.sram_target_um2;
  g.unrealistic = (c == CellConfig::FV2T1R);
  return g;
}

struct LayerHeight {
  std::string name;
  double nm;
};

struct MtjStackGeometry {
  std::vector<LayerHeight> layers = {
      {"BE", 30.0}, {"SOT", 5.0}, {"MTJ", 30.0}, {"HM", 70.0},
      {"MHM", 50.0}, {"TE/HM", 100.0}, {"TV", 50.0}};
  double stack_height_nm() const {
    double h = 0;
    for (const auto& l : layers) h += l.nm;
    return h;
  }
};

inline double via_aspect_ratio(double stack_height_nm, double line_width_nm) {
  require(stack_height_nm > 0 && line_width_nm > 0, "domain",
          "via_aspect_ratio: inputs must be positive");
  return stack_height_nm / line_width_nm;
}

inline constexpr double kViaRiskAR = 3.0;

struct ViaReport {
  std::string route;
  double height_nm;
  double width_nm;
  double aspect_ratio;
  bool integration_risk;
};

/// Flagpole via spans the full stack; the stairwise route only the landing step.
inline std::vector<ViaReport> via_report(const MtjStackGeometry& s, const TechNode& t) {
  std::vector<ViaReport> out;
  double h = s.stack_height_nm();
  double ar = via_aspect_ratio(h, t.line_width_m2);
  out.push_back({"FV", h, t.line_width_m2, ar, ar > kViaRiskAR});
  ar = via_aspect_ratio(t.rv_landing_depth, t.line_width_m2);
  out.push_back({"RV", t.rv_landing_depth, t.line_width_m2, ar, ar > kViaRiskAR});
  return out;
}

struct SramRoadmapEntry {
  std::string node_label;
  double cpp;  // nm
  double mp;   // nm
  double sram_area_um2;
};

/// Number of whole CPP x MP tiles that fit in the SRAM bitcell area.
inline long cross_node_budget(const SramRoadmapEntry& e) {
  require(e.cpp > 0 && e.mp > 0 && e.sram_area_um2 > 0, "domain",
          "roadmap entry must have positive cpp, mp, area");
  double tile = e.cpp * e.mp * 1e-6;
  // guard against 0.021/0.021 landing a hair under 1
  return static_cast<long>(std::floor(e.sram_area_um2 / tile * (1 + 1e-12)));
}

inline double bitline_resistance(CellConfig c, int rows, const TechNode& t) {
  require(rows >= 1, "domain", "bitline_resistance: rows must be >= 1");
  return rows * t.width_cpp[index_of(c)] * t.cpp * t.bl_resistance_per_length;
}

/** \brief Single Ohm/nm constant that minimizes the worst relative error
 *  against measured per-config bitline resistances.
 *
 *  Each target gives r_i = R_i / (rows * width_nm_i). Minimax relative error
 *  over positive ratios is attained at the harmonic-style midpoint
 *  2 r_min r_max / (r_min + r_max).
 */
struct BlTarget {
  CellConfig config;
  double resistance;  // ohm
};

inline double fit_bl_resistance_per_length(const std::vector<BlTarget>& targets, int rows,
                                           const TechNode& t) {
  require(!targets.empty(), "domain", "no bitline targets");
  double lo = 1e300, hi = 0;
  for (const auto& b : targets) {
    double r = b.resistance / (rows * t.width_cpp[index_of(b.config)] * t.cpp);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return 2 * lo * hi / (lo + hi);
}

}  // namespace sotdtco

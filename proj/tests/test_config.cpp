#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include <sotdtco/config.hpp>

using namespace sotdtco;

namespace {

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() + " " + e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("unknown keys are reported with their path") {
  RunConfig c;
  auto msg = code_of([&] { apply_json(c, json::parse(R"({"read": {"line_cap_fF": 1}})")); });
  CHECK(msg.find("config_unknown_key") == 0);
  CHECK(msg.find("/read/line_cap_fF") != std::string::npos);

  msg = code_of([&] { apply_json(c, json::parse(R"({"devices": {"igzo": {"ss": 0.1}}})")); });
  CHECK(msg.find("/devices/igzo/ss") != std::string::npos);

  msg = code_of([&] { apply_json(c, json::parse(R"({"roadmap": [{"node": "N7", "cpp": 56, "pitch": 40}]})")); });
  CHECK(msg.find("/roadmap/0/pitch") != std::string::npos);
}

TEST_CASE("schema version and types are checked") {
  RunConfig c;
  CHECK(code_of([&] { apply_json(c, json::parse(R"({"schema_version": 2})")); }).find("config_version") == 0);
  CHECK(code_of([&] { apply_json(c, json::parse(R"({"tech": {"cpp": "wide"}})")); }).find("config_type") == 0);
  CHECK(code_of([&] { apply_json(c, json::parse(R"([1, 2])")); }).find("config_type") == 0);
}

TEST_CASE("units are converted on read") {
  RunConfig c;
  apply_json(c, json::parse(R"({"read": {"line_cap_per_cell_fF": 0.2, "window_ns": 5, "dt_out_ps": 1},
                                "write": {"tau_write_ns": 3},
                                "calibration": {"i_cell_uA": {"2T1R-RV": {"tt": 100, "ss": 90, "ff": 110}}}})"));
  CHECK(c.read.line_cap_per_cell == doctest::Approx(0.2e-15));
  CHECK(c.read.window == doctest::Approx(5e-9));
  CHECK(c.read.dt_out == doctest::Approx(1e-12));
  CHECK(c.write.tau_write == doctest::Approx(3e-9));
  REQUIRE(c.write_targets.i_cell.size() == 1);
  CHECK(c.write_targets.i_cell[0].second[1] == doctest::Approx(90e-6));
}

TEST_CASE("fitted parameters round-trip") {
  RunConfig a;
  a.finfet.g_ref = 7.1e-5;
  a.read.schottky.i_0 = 3e-17;
  a.read.igzo.dibl = 0.05;
  a.read.line_cap_per_cell = 0.07e-15;
  a.write.r_access[2] = 999;
  a.tech.bl_resistance_per_length = 0.061;
  RunConfig b;
  apply_json(b, json::parse(fitted_json(a).dump()));
  CHECK(b.finfet.g_ref == a.finfet.g_ref);
  CHECK(b.read.schottky.i_0 == a.read.schottky.i_0);
  CHECK(b.read.igzo.dibl == a.read.igzo.dibl);
  CHECK(b.read.line_cap_per_cell == doctest::Approx(a.read.line_cap_per_cell).epsilon(1e-14));
  CHECK(b.write.r_access[2] == 999);
  CHECK(b.tech.bl_resistance_per_length == 0.061);
}

TEST_CASE("load_config errors") {
  CHECK(code_of([] { load_config("/nonexistent/cfg.json"); }).find("config_missing") == 0);
  auto p = std::filesystem::temp_directory_path() / "sotdtco_bad.json";
  {
    std::ofstream f(p);
    f << "{ \"tech\": ";
  }
  CHECK(code_of([&] { load_config(p.string()); }).find("config_parse") == 0);
  {
    std::ofstream f(p);
    f << R"({"tech": {"cpp": 30, "mp": 40}})";
  }
  CHECK(code_of([&] { load_config(p.string()); }).find("invalid_tech") == 0);
  std::filesystem::remove(p);
}

TEST_CASE("shipped default config loads and validates") {
  auto c = load_config(std::string(SOTDTCO_SOURCE_DIR) + "/configs/default.json");
  CHECK(c.read_points.size() == 5);
  CHECK(c.roadmap.size() == 5);
  CHECK(c.write_targets.i_cell.size() == 4);
}

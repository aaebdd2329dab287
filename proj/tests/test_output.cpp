#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpforce/error.hpp"
#include "cpforce/output.hpp"
#include "support.hpp"

using namespace cpforce;
using json = nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  return out;
}

std::string g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

const std::string kHash = "0123456789abcdef";

ForceMap sample_map() {
  ForceMap m;
  m.grid = MapGrid{{1e-4, 0.5}, {0.01}};
  for (int i = 0; i < 2; ++i) {
    MapCell c;
    c.x0 = m.grid.x0[i];
    c.z0 = 0.01;
    c.forces = SpecialStateForces{-1.0 / 3.0, 2.0e5, 123456.789012345, -7e-12, 1.0, 2.0, 3.0, 1.5};
    m.cells.push_back(c);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  m.cells[1].failed = true;
  m.cells[1].forces = SpecialStateForces{nan, nan, nan, nan, nan, nan, nan, nan};
  m.failures.push_back(MapFailure{1, 0.5, 0.01, "adaptive quadrature did not converge"});
  return m;
}

}  // namespace

TEST_CASE("force map CSV schema") {
  const std::string csv = force_map_csv(sample_map(), kHash);
  const auto lines = split(csv, '\n');
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "# config_hash=" + kHash + " schema=" + kForceMapSchema);
  CHECK(lines[1] == "x0_k0,z0_k0,F_g,F_e,F_sup,F_sub,F_inf,Gam_sup,Gam_sub,Gam_nn,quad_err_flag");
  const auto ok = split(lines[2], ',');
  REQUIRE(ok.size() == 11);
  CHECK(ok[0] == g9(1e-4));
  CHECK(ok[2] == "-0.333333333");
  CHECK(ok[4] == "123456.789");
  CHECK(ok[5] == "-7e-12");
  CHECK(ok[10] == "0");
  const auto bad = split(lines[3], ',');
  REQUIRE(bad.size() == 11);
  CHECK(bad[10] == "1");
  CHECK(std::isnan(std::stod(bad[4])));
}

TEST_CASE("force series CSV converts units and reports the boost") {
  const EmitterParams em = cpforce::testing::emitter_700nm();
  ForceSeries s;
  s.t = {0.0, 0.5};
  s.force = {-2.0, -3.0};
  s.excitation = {2.0, 1.2};
  s.trace_err = {0.0, 1e-12};
  const std::string without = force_series_csv(s, em, kHash);
  auto lines = split(without, '\n');
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "# config_hash=" + kHash + " schema=" + kForceSeriesSchema);
  CHECK(lines[1] == "t_s,t_gamma0,F_total_natural,F_total_N,boost_N,excitation,trace_err");
  auto r = split(lines[3], ',');
  REQUIRE(r.size() == 7);
  CHECK(r[0] == g9(0.5 / em.gamma0));
  CHECK(r[1] == "0.5");
  CHECK(r[2] == "-3");
  CHECK(r[3] == g9(-3.0 * em.force_unit()));
  CHECK(r[4] == "0");

  s.reference = {-2.0, -2.5};
  r = split(split(force_series_csv(s, em, kHash), '\n')[3], ',');
  CHECK(r[4] == g9(-0.5 * em.force_unit()));
}

TEST_CASE("subradiant CSV has one column per basis state") {
  std::vector<SubradiantRow> rows{{0.01, 0.1, -1.0, 2.0, {0.1, 0.2, 0.3, 0.4, 0.5}},
                                  {0.02, 0.1, -1.5, 2.5, {0.6, 0.7, 0.8, 0.9, 1.0}}};
  const auto lines = split(subradiant_csv(rows, kHash), '\n');
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "# config_hash=" + kHash + " schema=" + kSubradiantSchema);
  CHECK(lines[1] == "x0_k0,z0_k0,F_g,F_e,F_sr_1,F_sr_2,F_sr_3,F_sr_4,F_sr_5");
  CHECK(lines[3] == "0.02,0.1,-1.5,2.5,0.6,0.7,0.8,0.9,1");
}

TEST_CASE("equal inputs give identical bytes") {
  CHECK(force_map_csv(sample_map(), kHash) == force_map_csv(sample_map(), kHash));
  const EmitterParams em = cpforce::testing::emitter_700nm();
  const CouplingSet c = build_couplings(Geometry{3, 0.05, 0.02}, cpforce::testing::gold(em), em, {});
  CHECK(couplings_json(c, em, kHash) == couplings_json(c, em, kHash));
}

TEST_CASE("coupling JSON carries hash, units and matrices") {
  const EmitterParams em = cpforce::testing::emitter_700nm();
  const CouplingSet c = build_couplings(Geometry{2, 0.05, 0.02}, cpforce::testing::gold(em), em, {});
  const json j = json::parse(couplings_json(c, em, kHash));
  CHECK(j.at("config_hash") == kHash);
  CHECK(j.dump().find("gamma_sc") != std::string::npos);
  CHECK(j.dump().find("omega_minus") != std::string::npos);
}

TEST_CASE("sidecar and failure JSON") {
  const json side = json::parse(sidecar_json("map", kHash, "[geometry]\nn = 2\n", R"({"cells": 2})"));
  CHECK(side.at("command") == "map");
  CHECK(side.at("config_hash") == kHash);
  CHECK(side.dump().find("n = 2") != std::string::npos);
  const json fail = json::parse(failures_json(sample_map(), kHash));
  CHECK(fail.dump().find("adaptive quadrature did not converge") != std::string::npos);
}

TEST_CASE("write_file creates directories and reports unwritable paths") {
  const auto dir = std::filesystem::temp_directory_path() / "cpforce_output_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const std::string path = (dir / "x.csv").string();
  write_file(path, "a,b\n");
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text == "a,b\n");
  CHECK_THROWS_AS(write_file("/proc/cpforce/x.csv", "x"), ConfigError);
  std::filesystem::remove_all(dir.parent_path());
}

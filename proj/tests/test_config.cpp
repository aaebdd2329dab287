#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "cpforce/config.hpp"
#include "cpforce/error.hpp"
#include "support.hpp"

using namespace cpforce;
using cpforce::testing::Gen;

namespace {

// Message of the ConfigError thrown by f, or "" if none.
template <class F>
std::string config_error(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig random_config(Gen& gen) {
  RunConfig c = preset(gen.coin() ? "fig2-gold" : "fig3-siv");
  apply_setting(c, "medium.plasma_frequency=" + fmt17(gen.log_uniform(1e15, 1e17)));
  apply_setting(c, "medium.loss_rate=" + fmt17(gen.log_uniform(1e12, 1e15)));
  if (gen.coin()) apply_setting(c, "emitter.omega0=" + fmt17(gen.log_uniform(1e15, 4e15)));
  if (gen.coin()) apply_setting(c, "emitter.gamma0=" + fmt17(gen.log_uniform(1e7, 1e9)));
  apply_setting(c, "geometry.n=" + std::to_string(gen.integer(1, 12)));
  apply_setting(c, gen.coin() ? "geometry.x0_k0=" + fmt17(gen.uniform(0.0, 5.0)) : "geometry.x0=" + fmt17(gen.log_uniform(1e-10, 1e-7)));
  apply_setting(c, "geometry.z0_k0=" + fmt17(gen.log_uniform(1e-3, 1.0)));
  apply_setting(c, "quadrature.rel_tol=" + fmt17(gen.log_uniform(1e-12, 1e-6)));
  apply_setting(c, "evolution.t_end_gamma0=" + fmt17(gen.uniform(0.1, 50.0)));
  apply_setting(c, "evolution.samples=" + std::to_string(gen.integer(1, 1000)));
  apply_setting(c, std::string("evolution.integrator=") + (gen.coin() ? "rk4" : "exponential"));
  apply_setting(c, "map.x0_k0_count=" + std::to_string(gen.integer(1, 200)));
  apply_setting(c, std::string("map.z0_k0_scale=") + (gen.coin() ? "log" : "linear"));
  apply_setting(c, "subradiant.z0_k0=" + fmt17(gen.log_uniform(1e-3, 1.0)));
  return c;
}

}  // namespace

TEST_CASE("to_ini round-trips every field exactly") {
  Gen gen(71);
  for (int trial = 0; trial < 50; ++trial) {
    const RunConfig a = random_config(gen);
    RunConfig b;
    load_ini_string(b, to_ini(a));
    INFO(to_ini(a));
    CHECK(to_ini(b) == to_ini(a));
    CHECK(config_hash(b) == config_hash(a));
    CHECK(b.quad.rel_tol == a.quad.rel_tol);
    CHECK(b.plasma_frequency == a.plasma_frequency);
  }
}

TEST_CASE("config hash is stable, sensitive and ignores run settings") {
  const RunConfig base = preset("fig2-gold");
  const std::string h = config_hash(base);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(config_hash(preset("fig2-gold")) == h);
  CHECK(config_hash(preset("fig3-siv")) != h);

  RunConfig c = base;
  apply_setting(c, "geometry.z0=" + fmt17(*base.z0 * (1.0 + 1e-15)));
  CHECK(config_hash(c) != h);

  RunConfig r = base;
  apply_setting(r, "run.threads=7");
  apply_setting(r, "run.out=/tmp/elsewhere");
  CHECK(config_hash(r) == h);
}

TEST_CASE("presets validate and resolve") {
  for (const auto& name : preset_names()) {
    const RunConfig c = preset(name);
    CHECK_NOTHROW(c.validate());
    CHECK_NOTHROW(c.geometry());
  }
  CHECK_NOTHROW(preset("fig3-siv").evolution());
  CHECK_NOTHROW(preset("fig2-gold").map_grid());
  CHECK_NOTHROW(preset("fig2-gold").subradiant_x0());
  const RunConfig f3 = preset("fig3-siv");
  CHECK(f3.geometry().n == 10);
  CHECK(f3.emitter().gamma0 == doctest::Approx(1.0 / 1.7e-9));
  CHECK(f3.evolution().t_end == doctest::Approx(1.5e-9 / 1.7e-9));
  const RunConfig f2 = preset("fig2-gold");
  CHECK(f2.map_grid().x0.front() == doctest::Approx(1e-4));
  CHECK(f2.map_grid().x0.back() == doctest::Approx(10.0));
  CHECK(config_error([] { preset("fig4"); }).find("unknown preset") != std::string::npos);
}

TEST_CASE("SI and k0-scaled lengths agree") {
  RunConfig a = preset("fig2-gold"), b = preset("fig2-gold");
  const double k0 = a.emitter().k0();
  apply_setting(b, "geometry.x0_k0=" + fmt17(*a.x0 * k0));
  apply_setting(b, "geometry.z0_k0=" + fmt17(*a.z0 * k0));
  CHECK(b.geometry().x0 == doctest::Approx(a.geometry().x0).epsilon(1e-15));
  CHECK(b.geometry().z0 == doctest::Approx(a.geometry().z0).epsilon(1e-15));
  CHECK(!b.x0.has_value());
}

TEST_CASE("missing and conflicting exclusive pairs name the field") {
  RunConfig c = preset("fig2-gold");
  c.z0.reset();
  const std::string missing = config_error([&] { c.geometry(); });
  CHECK(missing.find("geometry.z0") != std::string::npos);
  CHECK(missing.find("missing") != std::string::npos);

  RunConfig d;
  const std::string both = config_error([&] { load_ini_string(d, "[geometry]\nx0 = 1e-9\nx0_k0 = 0.1\n"); });
  CHECK(both.find("conflicts with") != std::string::npos);

  RunConfig e = preset("fig2-gold");
  apply_setting(e, "geometry.z0=-1e-9");
  CHECK(config_error([&] { e.geometry(); }).find("must be positive") != std::string::npos);
}

TEST_CASE("malformed input is a ConfigError") {
  RunConfig c = preset("fig2-gold");
  CHECK(config_error([&] { apply_setting(c, "geometry.bogus=1"); }).find("unknown config key") != std::string::npos);
  CHECK(config_error([&] { apply_setting(c, "geometry.n"); }).find("key=value") != std::string::npos);
  CHECK(config_error([&] { apply_setting(c, "geometry.n=2.5"); }).find("not an integer") != std::string::npos);
  CHECK(config_error([&] { apply_setting(c, "geometry.z0=1e-9x"); }).find("not a finite number") != std::string::npos);
  CHECK(config_error([&] { apply_setting(c, "geometry.z0=nan"); }).find("not a finite number") != std::string::npos);
  CHECK(config_error([&] { apply_setting(c, "map.x0_k0_scale=cubic"); }).find("map.x0_k0_scale") != std::string::npos);
  CHECK(config_error([&] { load_ini_string(c, "[geometry]\nn = 2\nn = 3\n"); }).find("duplicate") != std::string::npos);
  CHECK(config_error([&] { load_ini_string(c, "n = 2\n"); }).find("[section]") != std::string::npos);
  CHECK(config_error([&] { load_ini(c, "/nonexistent/cfg.ini"); }).find("cannot read") != std::string::npos);
}

TEST_CASE("section accessors check their own keys") {
  RunConfig c = preset("fig2-gold");
  c.n = 13;
  CHECK(config_error([&] { c.geometry(); }).find("geometry.n") != std::string::npos);
  c = preset("fig2-gold");
  c.sub_n = 5;
  CHECK(config_error([&] { c.subradiant_x0(); }).find("subradiant.n") != std::string::npos);
  c = preset("fig2-gold");
  c.map_x0.count = 0;
  CHECK(config_error([&] { c.map_grid(); }).find("map.x0_k0_count") != std::string::npos);
  c = preset("fig3-siv");
  c.integrator = "euler";
  CHECK(config_error([&] { c.evolution(); }).find("evolution.integrator") != std::string::npos);
  c = preset("fig3-siv");
  apply_setting(c, "geometry.n=3");
  apply_setting(c, "evolution.initial=dicke_m0");
  CHECK(config_error([&] { c.initial(); }).find("even") != std::string::npos);
  c = preset("fig2-gold");
  c.threads = 0;
  CHECK(config_error([&] { c.validate(); }).find("run.threads") != std::string::npos);
  c = preset("fig2-gold");
  c.medium_model = "silver";
  CHECK(config_error([&] { c.validate(); }).find("medium.model") != std::string::npos);
}

TEST_CASE("axis sampling") {
  const auto lin = AxisSpec{0.0, 1.0, 5, false}.values();
  REQUIRE(lin.size() == 5);
  CHECK(lin[2] == doctest::Approx(0.5));
  CHECK(lin.back() == 1.0);
  const auto lg = AxisSpec{1e-4, 10.0, 6, true}.values();
  REQUIRE(lg.size() == 6);
  CHECK(lg.front() == 1e-4);
  CHECK(lg.back() == 10.0);
  for (std::size_t i = 1; i < lg.size(); ++i) CHECK(lg[i] / lg[i - 1] == doctest::Approx(10.0));
  CHECK(AxisSpec{0.3, 0.3, 1, true}.values() == std::vector<double>{0.3});
}

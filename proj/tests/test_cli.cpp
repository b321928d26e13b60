#include "doctest.h"

#include "commands.hpp"
#include "output.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace porehom;
using namespace porehom::app;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json minimal() {
  return json::parse(R"({"version": 1,
    "geometry": {"radius": 0.25, "n_y": 8, "m": 2},
    "numerics": {"dt": 0.002, "t_end": 0.01, "macro_n": 16}})");
}

RunConfig parsed(const json& j) {
  RunConfig c = parse_config(j);
  c.validate();
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("porehom_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& cmd, const json& j, const fs::path& dir, std::optional<std::uint64_t> seed = {}) {
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << j.dump();
  CommandOptions opts;
  opts.config_path = cfg.string();
  opts.out_dir = (dir / "out").string();
  opts.seed = seed;
  std::ostringstream log;
  return run_command(cmd, opts, log);
}

}  // namespace

TEST_CASE("minimal config parses and round-trips through its canonical form") {
  const RunConfig c = parsed(minimal());
  CHECK(c.geometry.n_y == 8);
  CHECK(c.eps() == doctest::Approx(0.5));
  CHECK(c.micro_lambda() == doctest::Approx(1.5));
  const RunConfig again = parsed(c.canonical);
  CHECK(again.canonical == c.canonical);
  CHECK(config_hash(again) == config_hash(c));
}

TEST_CASE("config errors") {
  auto expect_error = [](json j, const std::string& fragment) {
    std::string msg;
    try {
      parsed(j);
    } catch (const ConfigError& e) {
      msg = e.what();
    }
    CAPTURE(j.dump());
    CHECK(msg.find(fragment) != std::string::npos);
  };
  json j = minimal();
  j["geometry"]["colour"] = "red";
  expect_error(j, "'geometry.colour'");

  j = minimal();
  j.erase("version");
  expect_error(j, "version");
  j["version"] = 2;
  expect_error(j, "version");

  j = minimal();
  j["geometry"]["radius"] = 0.6;
  expect_error(j, "inclusion");

  j = minimal();
  j["geometry"]["n_y"] = "eight";
  expect_error(j, "geometry.n_y");

  j = minimal();
  j["study"]["m_list"] = json::array();
  expect_error(j, "at least one eps");

  j = minimal();
  j["physics"]["source"] = {{"c1", 0.0}, {"c2", 0.0}};
  expect_error(j, "slope");

  j = minimal();
  j["physics"]["source"] = {{"c1", 0.5}, {"c2", 400.0}};
  expect_error(j, "dt");

  j = minimal();
  j["physics"]["phi0"] = {{"kind", "checkerboard"}};
  expect_error(j, "phi0");
}

TEST_CASE("sha256 matches the standard test vector") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config hash ignores key order and output dir but not physics") {
  const json a = minimal();
  json b = json::parse(R"({"numerics": {"macro_n": 16, "t_end": 0.01, "dt": 0.002},
    "geometry": {"m": 2, "n_y": 8, "radius": 0.25}, "version": 1, "output": {"dir": "elsewhere"}})");
  CHECK(config_hash(parsed(a)) == config_hash(parsed(b)));
  b["physics"]["lambda"] = 0.5;
  CHECK(config_hash(parsed(a)) != config_hash(parsed(b)));

  RunConfig c = parsed(a);
  override_seed(c, 7);
  CHECK(c.physics.seed == 7);
  CHECK(c.physics.phi0.seed == 7);
  CHECK(config_hash(c) != config_hash(parsed(a)));
}

TEST_CASE("cell command on an empty inclusion gives identity tensors") {
  const fs::path dir = scratch("cell");
  json j = minimal();
  j["geometry"]["radius"] = 0.0;
  REQUIRE(run("cell", j, dir) == kPass);
  const json r = json::parse(slurp(dir / "out/cell_report.json"));
  CHECK(r["passed"] == true);
  CHECK(r["tensors"]["porosity"] == doctest::Approx(1.0));
  for (const char* key : {"b_hom", "c_hom"})
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) CHECK(r["tensors"][key][i][k].get<double>() == doctest::Approx(i == k).epsilon(1e-10));
  CHECK(r["config_hash"] == config_hash(parsed(j)));
}

TEST_CASE("micro with zero data keeps a flat trace") {
  const fs::path dir = scratch("flat");
  json j = minimal();
  j["physics"]["phi0"] = {{"kind", "uniform"}, {"mean", 0.0}};
  REQUIRE(run("micro", j, dir) == kPass);
  const json r = json::parse(slurp(dir / "out/micro_report.json"));
  const double t0 = r["summary"]["energy_initial"].get<double>();
  CHECK(r["summary"]["energy_final"].get<double>() == doctest::Approx(t0).epsilon(1e-14));
  CHECK(r["summary"]["max_energy_rise"].get<double>() <= 1e-14 * t0);
  CHECK(r["summary"]["steps"] == 5);
}

TEST_CASE("micro snapshots and trace are bitwise reproducible") {
  const fs::path a = scratch("repro_a"), b = scratch("repro_b");
  json j = minimal();
  j["physics"]["u0"] = {{"kind", "vortex"}, {"amplitude", 1.0}};
  j["numerics"]["snapshot_every"] = 2;
  REQUIRE(run("micro", j, a, 11) == kPass);
  REQUIRE(run("micro", j, b, 11) == kPass);
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a / "out")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), a / "out");
    CAPTURE(rel.string());
    CHECK(slurp(e.path()) == slurp(b / "out" / rel));
    ++files;
  }
  CHECK(files > 10);
  const json r = json::parse(slurp(a / "out/micro_report.json"));
  CHECK(r["summary"]["energy_nonincreasing"] == true);

  const fs::path c = scratch("repro_c");
  REQUIRE(run("micro", j, c, 12) == kPass);
  CHECK(slurp(a / "out/trace.csv") != slurp(c / "out/trace.csv"));
}

TEST_CASE("snapshot layout matches its sidecar") {
  const fs::path dir = scratch("layout");
  json j = minimal();
  REQUIRE(run("micro", j, dir) == kPass);
  const json side = json::parse(slurp(dir / "out/snapshots/u_final.json"));
  const auto bytes = slurp(dir / "out/snapshots/u_final.raw").size();
  CHECK(side["shape"][0] == 16);
  CHECK(bytes == 2 * 16 * 16 * sizeof(double));
  CHECK(side["t"].get<double>() == doctest::Approx(0.01));
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  CommandOptions opts;
  opts.config_path = (dir / "missing.json").string();
  std::ostringstream log;
  CHECK(run_command("cell", opts, log) == kConfigError);
  CHECK(run_command("nonsense", opts, log) == kConfigError);
  json j = minimal();
  j["geometry"]["radius"] = 0.45;
  CHECK(run("cell", j, dir) == kConfigError);
  CHECK(run("unfold", minimal(), dir) == kPass);
  CHECK(run("geometry dump", minimal(), dir) == kPass);
  CHECK(fs::exists(dir / "out/mask.pgm"));
}

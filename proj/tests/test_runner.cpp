#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "degenwave/config.hpp"
#include "degenwave/runner.hpp"

using namespace degenwave;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path d = fs::temp_directory_path() / ("degenwave_test_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "run.ini";
  std::ofstream(p) << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ostringstream ss;
  ss << std::ifstream(p).rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing", "[runner]") {
  const auto dir = temp_dir("cfg");
  const auto path = write_config(dir,
                                 "# comment\n"
                                 "[model]\n"
                                 "m = 2.5\n"
                                 "chi = 0.05\n"
                                 "\n"
                                 "[sweep]\n"
                                 "chi = 0, 0.02, 0.05\n"
                                 "simulate = true\n");
  const auto cfg = resolve_config(ConfigFile::load(path.string()));
  REQUIRE(cfg.model.m == 2.5);
  REQUIRE(cfg.model.chi == 0.05);
  REQUIRE(cfg.model.a == 1.0);  // default
  REQUIRE(cfg.sweep_chi == std::vector<double>{0.0, 0.02, 0.05});
  REQUIRE(cfg.sweep_simulate);

  SECTION("missing file") {
    REQUIRE_THROWS_AS(ConfigFile::load((dir / "nope.ini").string()),
                      InvalidParams);
  }
  SECTION("unknown key rejected") {
    const auto bad = write_config(dir, "[model]\nmm = 2\n");
    REQUIRE_THROWS_AS(resolve_config(ConfigFile::load(bad.string())),
                      InvalidParams);
  }
  SECTION("bad number rejected") {
    const auto bad = write_config(dir, "[model]\nm = two\n");
    REQUIRE_THROWS_AS(resolve_config(ConfigFile::load(bad.string())),
                      InvalidParams);
  }
  SECTION("bad section header rejected") {
    const auto bad = write_config(dir, "[model\nm = 2\n");
    REQUIRE_THROWS_AS(ConfigFile::load(bad.string()), InvalidParams);
  }
}

TEST_CASE("variational command artifacts and determinism", "[runner]") {
  const auto dir = temp_dir("var");
  RunConfig cfg;
  cfg.out_dir = (dir / "out").string();
  REQUIRE(cmd_variational(cfg) == kExitOk);

  const auto payload = fs::path(cfg.out_dir) / "variational.json";
  const auto j = nlohmann::json::parse(slurp(payload));
  REQUIRE(j["schema_version"] == 1);
  REQUIRE(j["config"]["model"]["m"] == 2.0);
  REQUIRE(std::abs(j["c_star_0"].get<double>() - 1.0) < 1e-3);
  REQUIRE(std::abs(j["sigma"].get<double>() - 3.0) < 0.06);
  REQUIRE(fs::exists(fs::path(cfg.out_dir) / "g_tilde.csv"));
  REQUIRE(fs::exists(fs::path(cfg.out_dir) / "variational.meta.json"));

  // bit-identical payload on rerun; no timestamps in the payload
  const std::string first = slurp(payload);
  REQUIRE(cmd_variational(cfg) == kExitOk);
  REQUIRE(slurp(payload) == first);

  SECTION("m = 1 is a solver error") {
    cfg.model.m = 1.0;
    REQUIRE(cmd_variational(cfg) == kExitSolver);
  }
}

TEST_CASE("speed command", "[runner]") {
  const auto dir = temp_dir("speed");
  RunConfig cfg;
  cfg.model.chi = 0.05;
  cfg.out_dir = (dir / "out").string();
  REQUIRE(cmd_speed(cfg) == kExitOk);
  const auto j =
      nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "speed.json"));
  REQUIRE(j["converged"] == true);
  REQUIRE(j["bounds_check"] == "pass");
  REQUIRE(j["admissible"] == true);
  const double ratio = j["ratio"].get<double>();
  REQUIRE(ratio >= 0.925);
  REQUIRE(ratio < 1.0);

  const std::string head = slurp(fs::path(cfg.out_dir) / "wave.csv")
                               .substr(0, 22);
  REQUIRE(head == "xi,phi,eta,eta_prime\n-");

  SECTION("chi = 0 reports ratio exactly 1") {
    RunConfig c0;
    c0.fp.compute_sigma = false;
    c0.out_dir = (dir / "out0").string();
    REQUIRE(cmd_speed(c0) == kExitOk);
    const auto j0 =
        nlohmann::json::parse(slurp(fs::path(c0.out_dir) / "speed.json"));
    REQUIRE(j0["ratio"] == 1.0);
  }
}

TEST_CASE("classify command", "[runner]") {
  const auto dir = temp_dir("cls");
  RunConfig cfg;
  cfg.model.m = 2.5;
  cfg.out_dir = (dir / "out").string();
  REQUIRE(cmd_classify(cfg) == kExitOk);
  const auto j =
      nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "classify.json"));
  REQUIRE(j["class"] == "sharp");
  REQUIRE(j["consistency"] == "pass");
  const double fitted = j["fitted_exponent"].get<double>();
  REQUIRE(std::abs(fitted - 2.0 / 3.0) < 0.05 * 2.0 / 3.0);
}

TEST_CASE("simulate command", "[runner]") {
  const auto dir = temp_dir("sim");
  RunConfig cfg;
  cfg.sim_h = 0.1;
  cfg.sim_T_final = 15.0;
  cfg.sim_x_lo = -30.0;
  cfg.sim_x_hi = 8.0;
  cfg.sim_snapshots = {10.0};
  cfg.out_dir = (dir / "out").string();
  REQUIRE(cmd_simulate(cfg) == kExitOk);
  const auto j =
      nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "simulate.json"));
  REQUIRE(std::abs(j["empirical_speed"].get<double>() - 1.0) < 0.05);
  REQUIRE(fs::exists(fs::path(cfg.out_dir) / "front.csv"));
  REQUIRE(fs::exists(fs::path(cfg.out_dir) / "snapshot_t10.csv"));

  SECTION("too short a run is a runtime error") {
    cfg.sim_T_final = 1.0;
    cfg.out_dir = (dir / "short").string();
    REQUIRE(cmd_simulate(cfg) == kExitSolver);
  }
}

TEST_CASE("sweep command", "[runner]") {
  const auto dir = temp_dir("sweep");
  RunConfig cfg;
  cfg.sweep_m = {2.0};
  cfg.sweep_chi = {0.0, 0.05};
  cfg.workers = 2;
  cfg.fp.compute_sigma = false;
  cfg.out_dir = (dir / "out").string();
  REQUIRE(cmd_sweep(cfg) == kExitOk);
  const auto j =
      nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "sweep.json"));
  REQUIRE(j["cells"].size() == 2);
  for (const auto& cell : j["cells"]) {
    REQUIRE(cell["status"] == "ok");
    const double ratio = cell["ratio"].get<double>();
    if (cell["chi"].get<double>() == 0.0)
      REQUIRE(ratio == 1.0);
    else
      REQUIRE(ratio < 1.0);
  }

  SECTION("empty sweep list is a usage error") {
    cfg.sweep_m.clear();
    REQUIRE(cmd_sweep(cfg) == kExitUsage);
  }
  SECTION("a failing cell is flagged, the rest complete") {
    cfg.sweep_m = {2.0, 1.0};  // m = 1 rejected by the degenerate solver
    cfg.out_dir = (dir / "mixed").string();
    REQUIRE(cmd_sweep(cfg) == kExitOk);
    const auto jm = nlohmann::json::parse(
        slurp(fs::path(cfg.out_dir) / "sweep.json"));
    int ok = 0, failed = 0;
    for (const auto& cell : jm["cells"])
      (cell["status"] == "ok" ? ok : failed)++;
    REQUIRE(ok == 2);
    REQUIRE(failed == 2);
  }
}

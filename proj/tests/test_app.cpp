#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include "privdac/app.hpp"
#include "privdac/errors.hpp"
#include "privdac/scenario.hpp"

using namespace privdac;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("privdac_app_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

int cli(const std::string& args) {
  const std::string cmd = std::string(PRIVDAC_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("consensus command writes its outputs") {
  ScenarioSource src;
  src.builtin = "paper-targets";
  src.horizon = 5.0;
  const ScenarioConfig cfg = load_scenario(src);
  const fs::path out = scratch("consensus");
  const CommandResult r = consensus_command(cfg, out);
  for (const char* f : {"trace.csv", "summary.json", "manifest.json", "config.json"}) {
    CAPTURE(f);
    CHECK(fs::exists(out / f));
  }
  const json summary = read_json(out / "summary.json");
  CHECK(summary["schema_version"] == kSummarySchemaVersion);
  CHECK(summary["command"] == "consensus");
  CHECK(summary["mode"] == "decomposed");
  CHECK(summary["results"]["tracking_error_final"].get<double>() <= cfg.checks.tracking_error_max);
  CHECK(summary["pass"] == r.pass);
  CHECK(r.pass);
  const json manifest = read_json(out / "manifest.json");
  CHECK(manifest["config_hash"] == summary["config_hash"]);
  CHECK(slurp(out / "trace.csv").rfind("t,x_alpha_1_0,x_alpha_1_1,", 0) == 0);

  // A re-run rewrites identical bytes.
  const std::string csv = slurp(out / "trace.csv");
  const std::string sum = slurp(out / "summary.json");
  consensus_command(cfg, out);
  CHECK(slurp(out / "trace.csv") == csv);
  CHECK(slurp(out / "summary.json") == sum);
}

TEST_CASE("conventional and decomposed agree on the consensus value") {
  ScenarioSource src;
  src.builtin = "constant-cycle4";
  src.horizon = 40.0;
  src.mode = "conventional";
  const json conv = consensus_command(load_scenario(src), scratch("conv"))
                        .summary["results"]["consensus_value"];
  src.mode = "decomposed";
  const json dec = consensus_command(load_scenario(src), scratch("dec")).summary["results"]["consensus_value"];
  for (int c = 0; c < 2; ++c) CHECK(std::abs(conv[c].get<double>() - dec[c].get<double>()) <= 1e-4);
}

TEST_CASE("load_scenario overrides and conflicts") {
  ScenarioSource src;
  src.builtin = "constant-cycle4";
  src.dt = 2e-3;
  src.seed = 99;
  const ScenarioConfig cfg = load_scenario(src);
  CHECK(cfg.dt == 2e-3);
  CHECK(cfg.seed == 99);
  src.config_path = "x.json";
  CHECK_THROWS_AS(load_scenario(src), ValidationError);
  ScenarioSource bad;
  bad.builtin = "paper-targets";
  bad.dt = -1.0;
  CHECK_THROWS_AS(load_scenario(bad), ValidationError);
}

TEST_CASE("spectral report") {
  const json c4 = spectral_report(graph_from_preset("cycle(4)"), "cycle(4)");
  CHECK(c4["lambda2"].get<double>() == doctest::Approx(2.0));
  CHECK(c4["lambda2_decomposed_predicted"].get<double>() == doctest::Approx(0.5857864376));
  CHECK(c4["difference"].get<double>() <= 1e-9);
  const json k4 = spectral_report(graph_from_preset("complete(4)"), "complete(4)");
  CHECK(k4["lambda2"].get<double>() == doctest::Approx(4.0));
  CHECK(k4["lambda2_decomposed_predicted"].get<double>() == doctest::Approx(0.5 * (6.0 - std::sqrt(20.0))));
  CHECK(k4["difference"].get<double>() <= 1e-9);
  CHECK(spectral_report(graph_from_preset("path(2)"), "path(2)")["lambda2"].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("sweep writes one directory per run") {
  const fs::path out = scratch("sweep");
  ScenarioConfig a = constant_cycle_scenario();
  a.horizon = 2.0;
  a.checks.tracking_error_max = 10.0;
  const CommandResult r = sweep_command({a}, {3, 1, 2}, out, 2);
  const json sweep = read_json(out / "sweep.json");
  REQUIRE(sweep["runs"].size() == 3);
  CHECK(sweep["runs"][0]["run_id"] == "constant-cycle4-seed1");
  CHECK(sweep["runs"][2]["run_id"] == "constant-cycle4-seed3");
  CHECK(fs::exists(out / "constant-cycle4-seed2" / "summary.json"));
  CHECK(r.pass);
  CHECK_THROWS_AS(sweep_command({a}, {1, 1}, out, 1), ValidationError);
}

TEST_CASE("command-line exit codes") {
  const fs::path out = scratch("cli");
  CHECK(cli("spectral --graph 'cycle(4)'") == 0);
  CHECK(cli("spectral --graph 'ring(4)'") == 2);
  CHECK(cli("--help") == 0);
  CHECK(cli("") == 2);
  CHECK(cli("consensus --frobnicate") == 2);
  CHECK(cli("consensus --scenario no-such --out-dir " + out.string()) == 2);
  CHECK(cli("consensus --scenario constant-cycle4 --horizon 10 --out-dir " + out.string()) == 0);
  CHECK(fs::exists(out / "summary.json"));
  // One second is too short for the 1e-4 tracking check: a check failure, not a config error.
  CHECK(cli("consensus --scenario constant-cycle4 --horizon 1 --out-dir " + out.string()) == 1);

  const fs::path bad = out / "bad_graph.json";
  {
    std::ofstream f(bad);
    f << R"({"base": "paper-targets", "graph": {"agents": 4, "edges": [[1, 2], [3, 4]]}})";
  }
  CHECK(cli("consensus --config " + bad.string() + " --out-dir " + (out / "bad").string()) == 2);
  const fs::path typo = out / "typo.json";
  {
    std::ofstream f(typo);
    f << R"({"base": "paper-targets", "kapa": 5})";
  }
  CHECK(cli("consensus --config " + typo.string() + " --out-dir " + (out / "typo").string()) == 2);
}

TEST_CASE("privacy-audit command prints a verdict") {
  const fs::path out = scratch("audit");
  const std::string cmd = std::string(PRIVDAC_CLI) + " privacy-audit --scenario paper-targets --horizon 3 --out-dir " +
                          out.string() + " > " + (fs::temp_directory_path() / "privdac_audit.txt").string();
  fs::create_directories(out);
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 0);
  const json verdict = json::parse(slurp(fs::temp_directory_path() / "privdac_audit.txt"));
  CHECK(verdict["pass"] == true);
  CHECK(verdict["max_deviation"].get<double>() <= 1e-6);
  CHECK(verdict.contains("beta_offset_residual"));
}

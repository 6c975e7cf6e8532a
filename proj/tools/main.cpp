#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "privdac/app.hpp"
#include "privdac/errors.hpp"

namespace fs = std::filesystem;
using privdac::ScenarioSource;

namespace {

struct SourceFlags {
  std::string config;
  std::string scenario;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::string out_dir = "out";

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON scenario file");
    cmd->add_option("--scenario", scenario, "built-in scenario (paper-targets, paper-formation, constant-cycle4)");
    cmd->add_option("--dt", dt, "integration step [s]");
    cmd->add_option("--horizon", horizon, "simulated time [s]");
    cmd->add_option("--seed", seed, "split seed");
    cmd->add_option("--mode", mode, "conventional | decomposed");
    cmd->add_option("--out-dir", out_dir, "output directory");
  }

  ScenarioSource source() const {
    ScenarioSource s;
    if (!config.empty()) s.config_path = config;
    if (!scenario.empty()) s.builtin = scenario;
    s.dt = dt;
    s.horizon = horizon;
    s.seed = seed;
    s.mode = mode;
    return s;
  }
};

void print_verdict(const privdac::CommandResult& r, const fs::path& out_dir) {
  std::cout << (r.pass ? "PASS " : "FAIL ") << r.scenario_id << " -> " << out_dir.string() << "\n";
  if (r.summary.contains("checks")) {
    for (const auto& c : r.summary["checks"]) {
      std::cout << "  " << (c["pass"].get<bool>() ? "ok   " : "FAIL ") << c["name"].get<std::string>() << " = "
                << c["value"].dump() << " (limit " << c["threshold"].dump() << ")\n";
    }
  }
  if (r.summary.contains("warnings")) {
    for (const auto& w : r.summary["warnings"]) std::cout << "  warning: " << w.get<std::string>() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving dynamic average consensus simulator"};
  app.require_subcommand(1);

  std::string graph_spec = "cycle(4)";
  auto* spectral = app.add_subcommand("spectral", "algebraic connectivity of L and of the decomposed Laplacian");
  spectral->add_option("--graph", graph_spec, "cycle(n), path(n) or complete(n)");

  SourceFlags consensus_flags, attack_flags, audit_flags, formation_flags;
  auto* consensus = app.add_subcommand("consensus", "run the consensus protocol and write a trace");
  consensus_flags.attach(consensus);
  auto* attack = app.add_subcommand("attack", "run the eavesdropper against one agent");
  attack_flags.attach(attack);
  auto* audit = app.add_subcommand("privacy-audit", "simulate the alternate world and compare broadcast traces");
  audit_flags.attach(audit);
  auto* formation = app.add_subcommand("formation", "track the consensus estimates with unicycle robots");
  formation_flags.attach(formation);

  std::vector<std::string> sweep_configs, sweep_scenarios;
  std::vector<std::uint64_t> sweep_seeds;
  std::string sweep_out = "out/sweep";
  std::optional<std::string> sweep_mode;
  std::optional<double> sweep_horizon;
  std::size_t jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "run many (scenario, seed) pairs in parallel");
  sweep->add_option("--config", sweep_configs, "JSON scenario files");
  sweep->add_option("--scenario", sweep_scenarios, "built-in scenarios");
  sweep->add_option("--seed", sweep_seeds, "seeds (repeatable)")->required();
  sweep->add_option("--mode", sweep_mode, "conventional | decomposed");
  sweep->add_option("--horizon", sweep_horizon, "simulated time [s]");
  sweep->add_option("--out-dir", sweep_out, "output directory");
  sweep->add_option("--jobs", jobs, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? privdac::kExitPass : privdac::kExitConfigError;
  }

  try {
    if (spectral->parsed()) {
      const auto report = privdac::spectral_report(privdac::graph_from_preset(graph_spec), graph_spec);
      std::cout << report.dump(2) << "\n";
      return report["difference"].get<double>() <= 1e-9 ? privdac::kExitPass : privdac::kExitCheckFailed;
    }
    privdac::CommandResult result;
    fs::path out;
    if (consensus->parsed()) {
      out = consensus_flags.out_dir;
      result = privdac::consensus_command(privdac::load_scenario(consensus_flags.source()), out);
    } else if (attack->parsed()) {
      out = attack_flags.out_dir;
      result = privdac::attack_command(privdac::load_scenario(attack_flags.source()), out);
    } else if (audit->parsed()) {
      out = audit_flags.out_dir;
      result = privdac::audit_command(privdac::load_scenario(audit_flags.source()), out);
      std::cout << nlohmann::json{{"pass", result.pass},
                                  {"max_deviation", result.summary["max_deviation"]},
                                  {"beta_offset_residual", result.summary["beta_offset_residual"]}}
                       .dump()
                << "\n";
      return result.pass ? privdac::kExitPass : privdac::kExitCheckFailed;
    } else if (formation->parsed()) {
      out = formation_flags.out_dir;
      ScenarioSource s = formation_flags.source();
      if (!s.config_path && !s.builtin) s.builtin = "paper-formation";
      result = privdac::formation_command(privdac::load_scenario(s), out);
    } else {
      if (sweep_configs.empty() && sweep_scenarios.empty()) {
        throw privdac::ValidationError("sweep needs at least one --config or --scenario");
      }
      std::vector<privdac::ScenarioConfig> configs;
      auto add = [&](ScenarioSource s) {
        s.horizon = sweep_horizon;
        s.mode = sweep_mode;
        configs.push_back(privdac::load_scenario(s));
      };
      for (const auto& path : sweep_configs) add(ScenarioSource{.config_path = path});
      for (const auto& name : sweep_scenarios) add(ScenarioSource{.builtin = name});
      out = sweep_out;
      result = privdac::sweep_command(configs, sweep_seeds, out, jobs);
      std::cout << (result.pass ? "PASS" : "FAIL") << " sweep of " << result.summary["runs"].size() << " runs -> "
                << out.string() << "\n";
      return result.pass ? privdac::kExitPass : privdac::kExitCheckFailed;
    }
    print_verdict(result, out);
    return result.pass ? privdac::kExitPass : privdac::kExitCheckFailed;
  } catch (const privdac::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return privdac::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return privdac::kExitCheckFailed;
  }
}

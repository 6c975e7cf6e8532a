#include "privdac/scenario.hpp"

#include <cmath>
#include <string>

#include "privdac/errors.hpp"
#include "privdac/rng.hpp"

namespace privdac {

std::string to_string(ConsensusMode mode) {
  return mode == ConsensusMode::Conventional ? "conventional" : "decomposed";
}

ConsensusMode parse_mode(const std::string& text) {
  if (text == "conventional") return ConsensusMode::Conventional;
  if (text == "decomposed") return ConsensusMode::Decomposed;
  throw ValidationError("mode must be 'conventional' or 'decomposed', got '" + text + "'");
}

void ScenarioConfig::validate() const {
  if (!is_connected(graph)) throw ValidationError("graph is not connected");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ValidationError("kappa must be a positive number");
  if (references.size() != graph.size()) {
    throw ValidationError("expected " + std::to_string(graph.size()) + " agent references, got " +
                          std::to_string(references.size()));
  }
  const std::size_t m = dimension();
  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto& r = references[i];
    if (r.rate.dimension() != m || static_cast<std::size_t>(r.initial.size()) != m) {
      throw ValidationError("agent " + std::to_string(i + 1) + " reference dimension differs from agent 1");
    }
    if (!r.initial.allFinite()) throw ValidationError("agent " + std::to_string(i + 1) + " has a non-finite initial value");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (!(horizon >= dt) || !std::isfinite(horizon)) throw ValidationError("horizon must be at least dt");
  if (sample_stride < 1) throw ValidationError("sample_stride must be at least 1");
  if (split.initial_range.first > split.initial_range.second ||
      split.amplitude_range.first > split.amplitude_range.second ||
      split.frequency_range.first > split.frequency_range.second) {
    throw ValidationError("split ranges must be ordered [low, high]");
  }
  if (attack) {
    if (attack->victim >= graph.size()) throw ValidationError("attack victim is not an agent of the graph");
    if (!(attack->k1 > 0 && attack->k2 > 0 && attack->k3 > 0 && attack->k4 > 0)) {
      throw ValidationError("observer gains k1..k4 must be positive");
    }
    if (!(attack->k3 > 1.0 / attack->k2)) throw ValidationError("observer gains must satisfy k3 > 1/k2");
  }
  if (formation) {
    if (m != 2) throw ValidationError("formation control needs planar (dimension 2) references");
    if (formation->robots.size() != graph.size()) {
      throw ValidationError("formation needs one robot per agent");
    }
    formation->gains.validate();
  }
  if (audit) {
    if (audit->target >= graph.size()) throw ValidationError("audit target is not an agent of the graph");
    if (audit->accomplice) {
      if (*audit->accomplice >= graph.size() || !graph.adjacent(audit->target, *audit->accomplice)) {
        throw ValidationError("audit accomplice must be a neighbour of the target");
      }
    } else if (graph.neighbors(audit->target).empty()) {
      throw ValidationError("audit target has no neighbour to act as accomplice");
    }
    if (static_cast<std::size_t>(audit->shift.size()) != m) throw ValidationError("audit shift dimension mismatch");
    if (audit->rate_change.dimension() != m) throw ValidationError("audit rate change dimension mismatch");
  }
}

Scenario resolve(const ScenarioConfig& config) {
  config.validate();
  Scenario out{config, {}};
  if (config.mode == ConsensusMode::Decomposed) {
    SplitMix64 seeds(config.seed);
    out.splits.reserve(config.references.size());
    for (const auto& ref : config.references) {
      out.splits.push_back(split(ref.rate, ref.initial, seeds.next(), config.split));
    }
  }
  return out;
}

ScenarioConfig paper_targets_scenario() {
  ScenarioConfig cfg;
  cfg.id = "paper-targets";
  cfg.graph_spec = "cycle(4)";
  cfg.graph = graph_from_preset(cfg.graph_spec);
  cfg.kappa = 5.0;
  const auto targets = paper_targets();
  cfg.references.assign(targets.begin(), targets.end());
  cfg.mode = ConsensusMode::Decomposed;
  cfg.attack = AttackSetup{};
  cfg.audit = AuditSetup{.target = 0, .accomplice = std::nullopt, .shift = Eigen::Vector2d(1.0, 0.0),
                         .rate_change = SignalDescriptor(2)};
  cfg.dt = 1e-3;
  cfg.horizon = 60.0;
  cfg.sample_stride = 10;
  cfg.seed = 7;
  return cfg;
}

ScenarioConfig paper_formation_scenario() {
  ScenarioConfig cfg = paper_targets_scenario();
  cfg.id = "paper-formation";
  cfg.attack.reset();
  cfg.audit.reset();
  // Gentle split: the robots steer along the broadcast estimate, whose heading
  // rate must stay below gamma3.
  cfg.split.initial_range = {-2.5, 2.5};
  cfg.split.amplitude_range = {-0.05, 0.05};
  cfg.split.frequency_range = {0.1, 0.3};
  FormationSetup f;
  const double start[4][2] = {{1.3, 5.2}, {-7.5, 2.6}, {-4.0, -5.5}, {5.2, -5.2}};
  const double bias[4][2] = {{4.0, 4.0}, {-4.0, 4.0}, {-4.0, -4.0}, {4.0, -4.0}};
  for (int i = 0; i < 4; ++i) {
    f.robots.push_back(RobotSetup{RobotPose{start[i][0], start[i][1], 0.0}, Eigen::Vector2d(bias[i][0], bias[i][1])});
  }
  cfg.formation = std::move(f);
  return cfg;
}

ScenarioConfig constant_cycle_scenario() {
  ScenarioConfig cfg;
  cfg.id = "constant-cycle4";
  cfg.graph_spec = "cycle(4)";
  cfg.graph = graph_from_preset(cfg.graph_spec);
  cfg.kappa = 1.0;
  const double values[4][2] = {{1.0, -2.0}, {3.0, 0.5}, {-1.5, 2.5}, {0.5, -1.0}};
  for (const auto& v : values) {
    cfg.references.push_back(Reference{Eigen::Vector2d(v[0], v[1]), SignalDescriptor(2)});
  }
  cfg.mode = ConsensusMode::Conventional;
  // Only the initial values are split; a rate perturbation would keep the
  // decomposed states oscillating around the average.
  cfg.split.amplitude_range = {0.0, 0.0};
  cfg.dt = 1e-3;
  cfg.horizon = 20.0;
  cfg.sample_stride = 10;
  cfg.seed = 1;
  cfg.checks.tracking_error_max = 1e-4;
  return cfg;
}

std::vector<std::string> builtin_scenario_names() {
  return {"paper-targets", "paper-formation", "constant-cycle4"};
}

ScenarioConfig builtin_scenario(const std::string& name) {
  if (name == "paper-targets") return paper_targets_scenario();
  if (name == "paper-formation") return paper_formation_scenario();
  if (name == "constant-cycle4") return constant_cycle_scenario();
  throw ValidationError("unknown built-in scenario '" + name + "'");
}

}  // namespace privdac

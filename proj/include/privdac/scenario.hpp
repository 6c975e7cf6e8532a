#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "privdac/formation.hpp"
#include "privdac/graph.hpp"
#include "privdac/signal.hpp"

namespace privdac {

enum class ConsensusMode { Conventional, Decomposed };

std::string to_string(ConsensusMode mode);
ConsensusMode parse_mode(const std::string& text);

/// Eavesdropper attached to one victim. Agents are 0-based here.
struct AttackSetup {
  std::size_t victim = 0;
  double k1 = 10.0;
  double k2 = 10.0;
  double k3 = 10.0;
  double k4 = 10.0;
};

struct RobotSetup {
  RobotPose initial;
  Eigen::Vector2d bias = Eigen::Vector2d::Zero();
};

/// One robot per agent; robot i follows agent i's broadcast estimate plus its bias.
struct FormationSetup {
  std::vector<RobotSetup> robots;
  ControllerGains gains;
};

/**
 * @brief Alternate-world request for the privacy audit.
 *
 * The alternate reference of the target is r_p(0) + shift with rate
 * f_p + rate_change. The accomplice defaults to the lowest-index neighbour.
 */
struct AuditSetup {
  std::size_t target = 0;
  std::optional<std::size_t> accomplice;
  Eigen::VectorXd shift;
  SignalDescriptor rate_change;
};

/// Pass/fail thresholds applied to run summaries.
struct CheckThresholds {
  double tracking_error_max = 1.0;
  double conservation_max = 1e-6;
  double attack_error_max = 0.05;
  double audit_tolerance = 1e-6;
  double formation_error_max = 0.05;
  double formation_w_max = 1e-3;
  double lyapunov_margin = 0.1;
};

/**
 * @brief Everything needed to reproduce one run.
 *
 * Invariants checked by validate(): connected graph, kappa > 0, one reference
 * per agent with a common dimension, dt > 0, horizon >= dt, stride >= 1, and
 * consistent attack / formation / audit sections.
 */
struct ScenarioConfig {
  std::string id = "scenario";
  std::string graph_spec;  ///< preset text, empty when the graph came from an edge list
  NetworkGraph graph;
  double kappa = 5.0;
  std::vector<Reference> references;
  ConsensusMode mode = ConsensusMode::Decomposed;
  SplitOptions split;
  std::optional<AttackSetup> attack;
  std::optional<FormationSetup> formation;
  std::optional<AuditSetup> audit;
  double dt = 1e-3;
  double horizon = 60.0;
  std::size_t sample_stride = 10;
  std::uint64_t seed = 1;
  CheckThresholds checks;

  std::size_t agents() const { return graph.size(); }
  std::size_t dimension() const { return references.empty() ? 0 : references.front().rate.dimension(); }
  void validate() const;
};

/// A config with its alpha / beta splits realised (empty in conventional mode).
struct Scenario {
  ScenarioConfig config;
  std::vector<SplitPair> splits;
};

/**
 * @brief Validate and realise the splits.
 *
 * Agent i is split with the i-th output of SplitMix64(config.seed).
 */
Scenario resolve(const ScenarioConfig& config);

/// Four mobile targets on cycle(4), decomposed mode, eavesdropper on agent 1.
ScenarioConfig paper_targets_scenario();

/// paper_targets_scenario plus four robots with the published initial positions and biases.
ScenarioConfig paper_formation_scenario();

/// Constant references on cycle(4), kappa = 1, conventional mode.
ScenarioConfig constant_cycle_scenario();

/// Names accepted by builtin_scenario.
std::vector<std::string> builtin_scenario_names();

/// Throws ValidationError for an unknown name.
ScenarioConfig builtin_scenario(const std::string& name);

}  // namespace privdac

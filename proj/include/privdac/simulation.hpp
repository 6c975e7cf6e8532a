#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "privdac/consensus.hpp"
#include "privdac/formation.hpp"
#include "privdac/observer.hpp"
#include "privdac/scenario.hpp"
#include "privdac/trace.hpp"

namespace privdac {

/**
 * @brief All enabled subsystems of a scenario packed into one flat state.
 *
 * Layout, in order:
 *   consensus  x (n*m), or alpha (n*m) then beta (n*m); agent rows contiguous
 *   observer   x_hat, r_hat, f_hat_prime, z (m each), only with an attack
 *   robots     s_x, s_y, theta, varpi per robot, only with a formation
 *
 * References are closed form and are not integrated. The desired headings
 * are the only memory outside the state: commit() records them at every
 * accepted step so that the next step unwraps theta_d against them.
 */
class CoupledSystem {
 public:
  explicit CoupledSystem(const Scenario& scenario);

  std::size_t state_size() const noexcept { return size_; }
  std::size_t observer_offset() const noexcept { return observer_offset_; }
  std::size_t robot_offset() const noexcept { return robot_offset_; }

  Eigen::VectorXd initial_state() const;
  Eigen::VectorXd derivative(double t, const Eigen::VectorXd& y) const;

  /// Accept y as the state at time t (updates the heading memory).
  void commit(double t, const Eigen::VectorXd& y);

  void declare_channels(Trace& trace) const;
  std::vector<double> sample_row(double t, const Eigen::VectorXd& y) const;

  /// Broadcast states (x, or alpha) as an n x m matrix.
  AgentMatrix broadcast(const Eigen::VectorXd& y) const;
  /// Hidden beta sub-states; empty in conventional mode.
  AgentMatrix hidden(const Eigen::VectorXd& y) const;

 private:
  struct Consensus {
    AgentMatrix state_rate;    // derivative of x or alpha
    AgentMatrix hidden_rate;   // derivative of beta (decomposed only)
  };
  Consensus consensus_rates(double t, const Eigen::VectorXd& y) const;
  ObserverState observer(const Eigen::VectorXd& y) const;
  RobotEvaluation robot(double t, const Eigen::VectorXd& y, std::size_t j, const AgentMatrix& broadcast,
                        const AgentMatrix& broadcast_rate) const;

  const Scenario* scenario_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  bool decomposed_ = false;
  std::optional<AttackConfig> attack_;
  std::size_t observer_offset_ = 0;
  std::size_t robot_offset_ = 0;
  std::size_t size_ = 0;
  std::vector<std::optional<double>> headings_;
};

/**
 * @brief Integrate a resolved scenario over [0, horizon] with fixed-step RK4.
 *
 * The step count is round(horizon / dt) and t_k = k dt. Samples are taken
 * every sample_stride steps and at the final step.
 */
Trace run(const Scenario& scenario);

/// resolve() then run().
Trace run(const ScenarioConfig& config);

}  // namespace privdac

#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "privdac/consensus.hpp"
#include "privdac/graph.hpp"
#include "privdac/signal.hpp"

namespace privdac {

class Trace;

/**
 * @brief Eavesdropper estimator for one victim agent.
 *
 * x_hat tracks the victim's broadcast state, r_hat and f_hat its private
 * reference and rate. f_hat is not a state: f_hat = k3 x + f_hat_prime.
 * z integrates the consensus coupling from z(0) = 0.
 */
struct ObserverState {
  Eigen::VectorXd x_hat;
  Eigen::VectorXd r_hat;
  Eigen::VectorXd f_hat_prime;
  Eigen::VectorXd z;
};

/// What the eavesdropper knows: topology, kappa and its own gains.
struct AttackConfig {
  std::size_t victim = 0;
  double k1 = 10.0;
  double k2 = 10.0;
  double k3 = 10.0;
  double k4 = 10.0;
  double kappa = 1.0;
  NetworkGraph graph;

  /// Gains positive, k3 > 1 / k2, victim inside the graph.
  void validate() const;
};

/**
 * @brief Observer derivative from one wiretapped frame.
 *
 * broadcast holds one row per agent. captured, when non-empty, flags which
 * rows were actually intercepted; the victim and all its neighbours must be.
 * Throws ValidationError on a missing observation.
 */
ObserverState observer_rhs(const ObserverState& obs, const Eigen::Ref<const AgentMatrix>& broadcast,
                           const AttackConfig& cfg, std::span<const bool> captured = {});

/// Starting point used by the simulator: x_hat = observed x, f_hat = 0, r_hat = z = 0.
ObserverState initial_observer(const Eigen::VectorXd& observed_x, const AttackConfig& cfg);

struct AttackEstimates {
  Eigen::VectorXd r_hat;
  Eigen::VectorXd f_hat;
};

AttackEstimates estimates(const ObserverState& obs, const Eigen::VectorXd& observed_x, const AttackConfig& cfg);

struct AttackMetrics {
  double final_error_r = 0.0;       ///< sup ||r - r_hat|| over the final window
  double final_error_f = 0.0;       ///< sup ||f - f_hat|| over the final window
  double final_min_error_r = 0.0;   ///< inf ||r - r_hat|| over the final window
  double final_mean_error_r = 0.0;
  double late_to_early_ratio = 0.0; ///< mean ||r~|| over the window's second half / first half
  double sup_error_after_transient = 0.0;
  bool bounded = false;
};

/**
 * @brief Error statistics of an attack run.
 *
 * The final window is [cutoff * T, T] with cutoff defaulting to 0.75.
 * bounded means every sample was finite and the final window's sup did not
 * exceed twice the sup over [0.1 T, cutoff * T].
 */
AttackMetrics attack_metrics(const Trace& trace, const Reference& truth, double cutoff_fraction = 0.75);

}  // namespace privdac

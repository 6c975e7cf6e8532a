#pragma once

#include <span>

#include <Eigen/Dense>

#include "privdac/graph.hpp"
#include "privdac/signal.hpp"

namespace privdac {

/// Row-major so that agent i's state is a contiguous row.
using AgentMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// x_i(t) of the conventional protocol, one row per agent.
struct ConsensusState {
  AgentMatrix x;
};

/// Broadcast (alpha) and hidden (beta) sub-states, one row per agent.
struct DecomposedState {
  AgentMatrix alpha;
  AgentMatrix beta;
};

/// kappa * sum_j a_ij (x_j - x_i) for every agent i.
AgentMatrix consensus_coupling(const Eigen::Ref<const AgentMatrix>& x, const NetworkGraph& graph, double kappa);

/// Row i of consensus_coupling only.
Eigen::RowVectorXd consensus_coupling_row(const Eigen::Ref<const AgentMatrix>& x, const NetworkGraph& graph,
                                          double kappa, std::size_t agent);

/// x_i' = f_i + kappa sum_j a_ij (x_j - x_i).
AgentMatrix conventional_rhs(const Eigen::Ref<const AgentMatrix>& x, const Eigen::Ref<const AgentMatrix>& rates,
                             const NetworkGraph& graph, double kappa);

/**
 * @brief Decomposed protocol derivative.
 *
 *   alpha_i' = f_i^alpha + kappa sum_j a_ij (alpha_j - alpha_i) + kappa (beta_i - alpha_i)
 *   beta_i'  = f_i^beta  + kappa (alpha_i - beta_i)
 *
 * beta_i never touches another agent.
 */
DecomposedState decomposed_rhs(const DecomposedState& state, const Eigen::Ref<const AgentMatrix>& alpha_rates,
                               const Eigen::Ref<const AgentMatrix>& beta_rates, const NetworkGraph& graph,
                               double kappa);

/// x_i(0) = r_i(0).
ConsensusState init_conventional(const Eigen::Ref<const AgentMatrix>& initial_references);

/// alpha_i(0), beta_i(0) taken from each split.
DecomposedState init_decomposed(std::span<const SplitPair> splits);

/// ||x_i - mean_j r_j|| per agent.
Eigen::VectorXd tracking_errors(const Eigen::Ref<const AgentMatrix>& states,
                                const Eigen::Ref<const AgentMatrix>& references);

/// Frobenius norm of the rows' deviation from their own column mean.
double disagreement(const Eigen::Ref<const AgentMatrix>& states);

}  // namespace privdac

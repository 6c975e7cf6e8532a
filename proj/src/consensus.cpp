#include "privdac/consensus.hpp"

#include <string>

#include "privdac/errors.hpp"

namespace privdac {

namespace {

void require_rows(const Eigen::Ref<const AgentMatrix>& m, const NetworkGraph& graph, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != graph.size()) {
    throw ValidationError(std::string(what) + " has " + std::to_string(m.rows()) + " rows, graph has " +
                          std::to_string(graph.size()) + " agents");
  }
}

void require_same_shape(const Eigen::Ref<const AgentMatrix>& a, const Eigen::Ref<const AgentMatrix>& b,
                        const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError(std::string(what) + " dimension mismatch");
  }
}

}  // namespace

Eigen::RowVectorXd consensus_coupling_row(const Eigen::Ref<const AgentMatrix>& x, const NetworkGraph& graph,
                                          double kappa, std::size_t agent) {
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(x.cols());
  const auto i = static_cast<Eigen::Index>(agent);
  for (std::size_t j : graph.neighbors(agent)) {
    acc += x.row(static_cast<Eigen::Index>(j)) - x.row(i);
  }
  return kappa * acc;
}

AgentMatrix consensus_coupling(const Eigen::Ref<const AgentMatrix>& x, const NetworkGraph& graph, double kappa) {
  require_rows(x, graph, "state");
  AgentMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = consensus_coupling_row(x, graph, kappa, i);
  }
  return out;
}

AgentMatrix conventional_rhs(const Eigen::Ref<const AgentMatrix>& x, const Eigen::Ref<const AgentMatrix>& rates,
                             const NetworkGraph& graph, double kappa) {
  require_same_shape(x, rates, "reference rate");
  return rates + consensus_coupling(x, graph, kappa);
}

DecomposedState decomposed_rhs(const DecomposedState& state, const Eigen::Ref<const AgentMatrix>& alpha_rates,
                               const Eigen::Ref<const AgentMatrix>& beta_rates, const NetworkGraph& graph,
                               double kappa) {
  require_same_shape(state.alpha, state.beta, "sub-state");
  require_same_shape(state.alpha, alpha_rates, "alpha rate");
  require_same_shape(state.beta, beta_rates, "beta rate");
  const AgentMatrix gap = state.beta - state.alpha;
  DecomposedState out;
  out.alpha = alpha_rates + consensus_coupling(state.alpha, graph, kappa) + kappa * gap;
  out.beta = beta_rates - kappa * gap;
  return out;
}

ConsensusState init_conventional(const Eigen::Ref<const AgentMatrix>& initial_references) {
  return ConsensusState{initial_references};
}

DecomposedState init_decomposed(std::span<const SplitPair> splits) {
  if (splits.empty()) throw ValidationError("no splits to initialise from");
  const auto n = static_cast<Eigen::Index>(splits.size());
  const auto m = splits.front().alpha_initial.size();
  DecomposedState out{AgentMatrix(n, m), AgentMatrix(n, m)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = splits[static_cast<std::size_t>(i)];
    if (s.alpha_initial.size() != m || s.beta_initial.size() != m) {
      throw ValidationError("split dimension mismatch at agent " + std::to_string(i + 1));
    }
    out.alpha.row(i) = s.alpha_initial.transpose();
    out.beta.row(i) = s.beta_initial.transpose();
  }
  return out;
}

Eigen::VectorXd tracking_errors(const Eigen::Ref<const AgentMatrix>& states,
                                const Eigen::Ref<const AgentMatrix>& references) {
  if (states.cols() != references.cols()) throw ValidationError("signal dimension mismatch");
  const Eigen::RowVectorXd average = references.colwise().mean();
  Eigen::VectorXd out(states.rows());
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    out(i) = (states.row(i) - average).norm();
  }
  return out;
}

double disagreement(const Eigen::Ref<const AgentMatrix>& states) {
  const Eigen::RowVectorXd mean = states.colwise().mean();
  return (states.rowwise() - mean).norm();
}

}  // namespace privdac

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "privdac/consensus.hpp"
#include "privdac/scenario.hpp"
#include "privdac/trace.hpp"

namespace privdac {

/// What the eavesdropper sees: A, kappa and the broadcast alpha sub-states.
struct ObservableTrace {
  double kappa = 0.0;
  Eigen::MatrixXi adjacency;
  std::vector<double> times;
  std::vector<AgentMatrix> samples;
};

/// Extract the alpha channels of a decomposed run.
ObservableTrace observable(const Trace& trace, const ScenarioConfig& config);

/// Deliberately wrong alternate worlds, one per rate condition of the construction.
enum class Breakage {
  None,
  DropTargetAlphaCorrection,       ///< f_bar_p^alpha = f_p^alpha
  DropTargetBetaCorrection,        ///< f_bar_p^beta = f_p^beta
  DropAccompliceAlphaCorrection,   ///< f_bar_l^alpha = f_l^alpha
  DropAccompliceBetaCorrection,    ///< f_bar_l^beta = f_l^beta
};

/**
 * @brief A second decomposed world that should look identical to the eavesdropper.
 *
 * The target's reference becomes r_bar_p = r_p + shift + integral(rate_change)
 * and the accomplice absorbs the opposite change so the average is kept.
 * Every other agent is copied.
 */
struct AlternateWorld {
  std::size_t target = 0;
  std::size_t accomplice = 0;
  Eigen::VectorXd shift;
  SignalDescriptor rate_change;
  Scenario scenario;
};

/**
 * @brief Assign r_bar, f_bar and the alpha / beta splits of the alternate world.
 *
 * With Delta(t) = r_bar_p(t) - r_p(t):
 *   alpha initials unchanged, beta_bar(0) = 2 r_bar(0) - alpha(0)
 *   f_bar_p^alpha = f_p^alpha - 2 kappa Delta,  f_bar_p^beta = 2 f_bar_p - f_bar_p^alpha
 *   f_bar_l^alpha = f_l^alpha + 2 kappa Delta,  f_bar_l^beta = 2 f_bar_l - f_bar_l^alpha
 * A zero shift with an empty rate change returns the original scenario.
 * Throws ValidationError if l is not a neighbour of p, the scenario is not
 * decomposed, or rate_change is unbounded.
 */
AlternateWorld build_alternate(const Scenario& original, std::size_t target, std::size_t accomplice,
                               const Eigen::VectorXd& shift, const SignalDescriptor& rate_change,
                               Breakage breakage = Breakage::None);

struct AlternateRun {
  Trace trace;
  ObservableTrace visible;
};

/// Integrate the alternate world with the given horizon and step.
AlternateRun simulate_alternate(const AlternateWorld& world, double horizon, double dt);

struct Indistinguishability {
  bool pass = false;
  double max_deviation = 0.0;
};

/// pass iff max over samples and agents of ||alpha_bar_i - alpha_i|| <= tol. Throws on grid or topology mismatch.
Indistinguishability verify_indistinguishable(const ObservableTrace& a, const ObservableTrace& b, double tol);

/**
 * @brief max over samples of ||(x_bar^beta - x^beta) - 2 (r_bar - r)|| for target and accomplice.
 *
 * Both traces must come from the same grid.
 */
double beta_offset_residual(const Trace& original, const Trace& alternate, const AlternateWorld& world);

struct AuditReport {
  bool pass = false;
  double max_deviation = 0.0;
  double beta_offset_residual = 0.0;
  double average_residual = 0.0;  ///< max over samples of ||avg r_bar - avg r||
  std::size_t target = 0;
  std::size_t accomplice = 0;
};

/**
 * @brief Run both worlds and compare what the eavesdropper sees.
 *
 * Attack and formation sections are dropped: they only read the alpha
 * states. pass also requires the beta offset identity to hold within tol.
 */
AuditReport run_audit(const Scenario& original, const AuditSetup& setup, double tol,
                      Breakage breakage = Breakage::None);

/// The lowest-index neighbour of target.
std::size_t default_accomplice(const NetworkGraph& graph, std::size_t target);

}  // namespace privdac

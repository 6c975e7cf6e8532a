#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "privdac/formation.hpp"
#include "privdac/observer.hpp"
#include "privdac/scenario.hpp"
#include "privdac/trace.hpp"

namespace privdac {

/**
 * @brief Exponential decay rate of a positive scalar channel.
 *
 * Least-squares slope of log(value) against t over samples with
 * t in [t_begin, t_end], negated. Samples at or below floor are skipped so
 * that round-off does not flatten the fit. Throws ValidationError when
 * fewer than two samples remain.
 */
double fit_decay_rate(const Trace& trace, const std::string& channel, double t_begin, double t_end,
                      double floor = 1e-12);

struct ConsensusSummary {
  std::vector<double> tracking_error_final;  ///< per agent at the last sample
  double tracking_error_final_max = 0.0;
  double conservation_max = 0.0;             ///< sup over the run
  double disagreement_final = 0.0;
  Eigen::VectorXd broadcast_average_final;   ///< column mean of the broadcast states at T
  Eigen::VectorXd reference_average_final;
  std::optional<double> decay_rate;          ///< only when a fit window was requested
};

/// fit_window, when given, is the [t_begin, t_end] passed to fit_decay_rate on "disagreement".
ConsensusSummary summarize_consensus(const Trace& trace, const ScenarioConfig& config,
                                     std::optional<std::pair<double, double>> fit_window = std::nullopt);

struct AttackSummary {
  AttackMetrics metrics;
  bool success = false;  ///< final r and f errors both within the threshold
};

AttackSummary summarize_attack(const Trace& trace, const ScenarioConfig& config);

struct RobotSummary {
  double e_x_final_max = 0.0;   ///< sup |e_x| over the last 5 s
  double e_y_final_max = 0.0;
  double e_theta_final_max = 0.0;
  double w_final_mean = 0.0;    ///< mean W over the last 10 s
  double v_bound_ratio_max = 0.0;  ///< sup V(t) / bound(V(0))
  double theta_d_rate_sup = 0.0;   ///< finite-difference sup |theta_d'| over the run
  double theta_d_rate_sup_settled = 0.0;  ///< same, over t >= 10% of the horizon
  bool varpi_monotone = true;
};

struct FormationSummary {
  std::vector<RobotSummary> robots;
  double error_final_max = 0.0;
  double w_final_mean_max = 0.0;
  double v_bound_ratio_max = 0.0;
  std::vector<std::string> warnings;
};

FormationSummary summarize_formation(const Trace& trace, const ScenarioConfig& config);

}  // namespace privdac

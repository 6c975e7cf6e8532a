#include "privdac/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "privdac/errors.hpp"

namespace privdac {

double fit_decay_rate(const Trace& trace, const std::string& channel, double t_begin, double t_end, double floor) {
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double t = trace.time(k);
    if (t < t_begin || t > t_end) continue;
    const double v = trace.scalar(channel, k);
    if (!(v > floor)) continue;
    const double y = std::log(v);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++count;
  }
  if (count < 2) throw ValidationError("decay fit on '" + channel + "' has fewer than two usable samples");
  const double n = static_cast<double>(count);
  const double denom = n * stt - st * st;
  if (!(denom > 0.0)) throw ValidationError("decay fit window is degenerate");
  return -(n * sty - st * sy) / denom;
}

ConsensusSummary summarize_consensus(const Trace& trace, const ScenarioConfig& config,
                                     std::optional<std::pair<double, double>> fit_window) {
  if (trace.empty()) throw ValidationError("empty trace");
  const std::size_t last = trace.size() - 1;
  const std::size_t n = config.agents();
  const bool decomposed = config.mode == ConsensusMode::Decomposed;
  ConsensusSummary out;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(config.dimension()));
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = std::to_string(i + 1);
    const double e = trace.scalar("tracking_error_" + id, last);
    out.tracking_error_final.push_back(e);
    out.tracking_error_final_max = std::max(out.tracking_error_final_max, e);
    sum += trace.value((decomposed ? "x_alpha_" : "x_") + id, last);
  }
  out.broadcast_average_final = sum / static_cast<double>(n);
  out.reference_average_final = trace.value("r_avg", last);
  out.disagreement_final = trace.scalar("disagreement", last);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out.conservation_max = std::max(out.conservation_max, trace.scalar("conservation", k));
  }
  if (fit_window) out.decay_rate = fit_decay_rate(trace, "disagreement", fit_window->first, fit_window->second);
  return out;
}

AttackSummary summarize_attack(const Trace& trace, const ScenarioConfig& config) {
  if (!config.attack) throw ValidationError("scenario has no attack section");
  AttackSummary out;
  out.metrics = attack_metrics(trace, config.references[config.attack->victim]);
  const double limit = config.checks.attack_error_max;
  out.success = out.metrics.final_error_r <= limit && out.metrics.final_error_f <= limit;
  return out;
}

FormationSummary summarize_formation(const Trace& trace, const ScenarioConfig& config) {
  if (!config.formation) throw ValidationError("scenario has no formation section");
  if (trace.empty()) throw ValidationError("empty trace");
  const double t_end = trace.times().back();
  const double settled = trace.times().front() + 0.1 * (t_end - trace.times().front());
  const ControllerGains& gains = config.formation->gains;
  FormationSummary out;
  for (std::size_t j = 0; j < config.formation->robots.size(); ++j) {
    const std::string id = std::to_string(j + 1);
    RobotSummary r;
    const double bound = lyapunov_bound(trace.scalar("V_" + id, 0), gains);
    double w_sum = 0.0;
    std::size_t w_count = 0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
      const double t = trace.time(k);
      if (t >= t_end - 5.0) {
        r.e_x_final_max = std::max(r.e_x_final_max, std::abs(trace.scalar("e_x_" + id, k)));
        r.e_y_final_max = std::max(r.e_y_final_max, std::abs(trace.scalar("e_y_" + id, k)));
        r.e_theta_final_max = std::max(r.e_theta_final_max, std::abs(trace.scalar("e_theta_" + id, k)));
      }
      if (t >= t_end - 10.0) {
        w_sum += trace.scalar("W_" + id, k);
        ++w_count;
      }
      r.v_bound_ratio_max = std::max(r.v_bound_ratio_max, trace.scalar("V_" + id, k) / bound);
      if (k > 0) {
        const double rate = std::abs(trace.scalar("theta_d_" + id, k) - trace.scalar("theta_d_" + id, k - 1)) /
                            (t - trace.time(k - 1));
        r.theta_d_rate_sup = std::max(r.theta_d_rate_sup, rate);
        if (trace.time(k - 1) >= settled) r.theta_d_rate_sup_settled = std::max(r.theta_d_rate_sup_settled, rate);
        const double varpi = trace.scalar("varpi_" + id, k);
        if (varpi > trace.scalar("varpi_" + id, k - 1) || !(varpi > 0.0) || varpi > 1.0) r.varpi_monotone = false;
      }
    }
    r.w_final_mean = w_count ? w_sum / static_cast<double>(w_count) : 0.0;
    out.error_final_max = std::max({out.error_final_max, r.e_x_final_max, r.e_y_final_max, r.e_theta_final_max});
    out.w_final_mean_max = std::max(out.w_final_mean_max, r.w_final_mean);
    out.v_bound_ratio_max = std::max(out.v_bound_ratio_max, r.v_bound_ratio_max);
    if (r.theta_d_rate_sup >= gains.gamma3) {
      out.warnings.push_back("robot " + id + ": gamma3 = " + format_double(gains.gamma3) +
                             " does not exceed sup |theta_d'| = " + format_double(r.theta_d_rate_sup) +
                             " (after the transient: " + format_double(r.theta_d_rate_sup_settled) + ")");
    }
    if (!r.varpi_monotone) out.warnings.push_back("robot " + id + ": varpi left (0, 1] or increased");
    out.robots.push_back(r);
  }
  return out;
}

}  // namespace privdac

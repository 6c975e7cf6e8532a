#include "privdac/observer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "privdac/errors.hpp"
#include "privdac/trace.hpp"

namespace privdac {

void AttackConfig::validate() const {
  if (!(k1 > 0.0 && k2 > 0.0 && k3 > 0.0 && k4 > 0.0)) {
    throw ValidationError("observer gains k1..k4 must be positive");
  }
  if (!(k3 > 1.0 / k2)) {
    throw ValidationError("observer gains must satisfy k3 > 1/k2");
  }
  if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
  if (victim >= graph.size()) {
    throw ValidationError("victim agent " + std::to_string(victim + 1) + " is not in the graph");
  }
}

ObserverState observer_rhs(const ObserverState& obs, const Eigen::Ref<const AgentMatrix>& broadcast,
                           const AttackConfig& cfg, std::span<const bool> captured) {
  const std::size_t i = cfg.victim;
  if (static_cast<std::size_t>(broadcast.rows()) != cfg.graph.size()) {
    throw ValidationError("wiretap frame does not cover the graph");
  }
  if (!captured.empty()) {
    if (captured.size() != cfg.graph.size()) throw ValidationError("capture mask size mismatch");
    if (!captured[i]) throw ValidationError("victim state was not observed");
    for (std::size_t j : cfg.graph.neighbors(i)) {
      if (!captured[j]) {
        throw ValidationError("missing observation of neighbour " + std::to_string(j + 1));
      }
    }
  }
  const Eigen::VectorXd x = broadcast.row(static_cast<Eigen::Index>(i)).transpose();
  const Eigen::VectorXd c = consensus_coupling_row(broadcast, cfg.graph, cfg.kappa, i).transpose();
  const Eigen::VectorXd f_hat = cfg.k3 * x + obs.f_hat_prime;
  const Eigen::VectorXd x_err = x - obs.x_hat;

  ObserverState d;
  d.x_hat = f_hat + c + cfg.k1 * x_err;
  d.r_hat = cfg.k2 * (x - obs.z - obs.r_hat) + f_hat;
  d.f_hat_prime = -cfg.k3 * (f_hat + c) + cfg.k4 * x_err;
  d.z = c;
  return d;
}

ObserverState initial_observer(const Eigen::VectorXd& observed_x, const AttackConfig& cfg) {
  const auto m = observed_x.size();
  return ObserverState{observed_x, Eigen::VectorXd::Zero(m), -cfg.k3 * observed_x, Eigen::VectorXd::Zero(m)};
}

AttackEstimates estimates(const ObserverState& obs, const Eigen::VectorXd& observed_x, const AttackConfig& cfg) {
  return {obs.r_hat, cfg.k3 * observed_x + obs.f_hat_prime};
}

AttackMetrics attack_metrics(const Trace& trace, const Reference& truth, double cutoff_fraction) {
  if (trace.empty()) throw ValidationError("attack metrics need a non-empty trace");
  if (!(cutoff_fraction >= 0.0 && cutoff_fraction < 1.0)) {
    throw ValidationError("transient cutoff must lie in [0, 1)");
  }
  const double t0 = trace.times().front();
  const double horizon = trace.times().back() - t0;
  const double cutoff = t0 + cutoff_fraction * horizon;
  const double settle = t0 + 0.1 * horizon;
  const double split = cutoff + 0.5 * (trace.times().back() - cutoff);

  AttackMetrics out;
  out.final_min_error_r = std::numeric_limits<double>::infinity();
  double sup_early = 0.0;
  double early_sum = 0.0, late_sum = 0.0;
  std::size_t window = 0, early_n = 0, late_n = 0;
  bool finite = true;
  for (std::size_t s = 0; s < trace.size(); ++s) {
    const double t = trace.time(s);
    const double er = (truth.value(t) - trace.value("obs_r_hat", s)).norm();
    const double ef = (truth.rate.value(t) - trace.value("obs_f_hat", s)).norm();
    finite = finite && std::isfinite(er) && std::isfinite(ef);
    if (t >= settle && t < cutoff) sup_early = std::max(sup_early, er);
    if (t >= settle) out.sup_error_after_transient = std::max(out.sup_error_after_transient, er);
    if (t >= cutoff) {
      out.final_error_r = std::max(out.final_error_r, er);
      out.final_error_f = std::max(out.final_error_f, ef);
      out.final_min_error_r = std::min(out.final_min_error_r, er);
      out.final_mean_error_r += er;
      ++window;
      if (t < split) {
        early_sum += er;
        ++early_n;
      } else {
        late_sum += er;
        ++late_n;
      }
    }
  }
  if (window == 0) throw ValidationError("trace has no samples in the final window");
  out.final_mean_error_r /= static_cast<double>(window);
  const double early_mean = early_n ? early_sum / static_cast<double>(early_n) : 0.0;
  const double late_mean = late_n ? late_sum / static_cast<double>(late_n) : early_mean;
  out.late_to_early_ratio = early_mean > 0.0 ? late_mean / early_mean : 1.0;
  out.bounded = finite && out.final_error_r <= 2.0 * sup_early + 1e-9;
  return out;
}

}  // namespace privdac

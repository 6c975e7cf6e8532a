#include "privdac/audit.hpp"

#include <algorithm>
#include <future>
#include <string>

#include "privdac/errors.hpp"
#include "privdac/simulation.hpp"

namespace privdac {

namespace {

/// Constant vector as a descriptor.
SignalDescriptor constant(const Eigen::VectorXd& v) {
  SignalDescriptor out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index c = 0; c < v.size(); ++c) {
    if (v(c) != 0.0) out.add(ConstantTerm{static_cast<std::size_t>(c), v(c)});
  }
  return out;
}

/// 2 kappa Delta(t) with Delta = shift + integral(rate_change), times sign.
SignalDescriptor correction(const Eigen::VectorXd& shift, const SignalDescriptor& rate_change, double kappa,
                            double sign) {
  SignalDescriptor out = constant(2.0 * kappa * sign * shift);
  if (!rate_change.empty()) {
    out.add(AccumulatedTerm{std::make_shared<const SignalDescriptor>(rate_change), 2.0 * kappa * sign});
  }
  return out;
}

Scenario without_observers(Scenario s) {
  s.config.attack.reset();
  s.config.formation.reset();
  s.config.audit.reset();
  return s;
}

}  // namespace

std::size_t default_accomplice(const NetworkGraph& graph, std::size_t target) {
  const auto& nb = graph.neighbors(target);
  if (nb.empty()) throw ValidationError("agent " + std::to_string(target + 1) + " has no neighbour");
  return *std::min_element(nb.begin(), nb.end());
}

ObservableTrace observable(const Trace& trace, const ScenarioConfig& config) {
  if (config.mode != ConsensusMode::Decomposed) throw ValidationError("observable trace needs a decomposed run");
  ObservableTrace out;
  out.kappa = config.kappa;
  out.adjacency = config.graph.adjacency();
  out.times = trace.times();
  const auto n = static_cast<Eigen::Index>(config.agents());
  const auto m = static_cast<Eigen::Index>(config.dimension());
  out.samples.reserve(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    AgentMatrix x(n, m);
    for (Eigen::Index i = 0; i < n; ++i) x.row(i) = trace.value("x_alpha_" + std::to_string(i + 1), k).transpose();
    out.samples.push_back(std::move(x));
  }
  return out;
}

AlternateWorld build_alternate(const Scenario& original, std::size_t target, std::size_t accomplice,
                               const Eigen::VectorXd& shift, const SignalDescriptor& rate_change, Breakage breakage) {
  const ScenarioConfig& cfg = original.config;
  if (cfg.mode != ConsensusMode::Decomposed) throw ValidationError("the audit needs a decomposed scenario");
  const std::size_t n = cfg.agents();
  if (target >= n || accomplice >= n) throw ValidationError("audit agent index out of range");
  if (!cfg.graph.adjacent(target, accomplice)) {
    throw ValidationError("accomplice " + std::to_string(accomplice + 1) + " is not a neighbour of target " +
                          std::to_string(target + 1));
  }
  if (static_cast<std::size_t>(shift.size()) != cfg.dimension() || rate_change.dimension() != cfg.dimension()) {
    throw ValidationError("audit shift / rate change dimension mismatch");
  }
  if (!shift.allFinite()) throw ValidationError("audit shift must be finite");
  if (!rate_change.bounded()) throw ValidationError("alternate reference rate must be bounded");

  AlternateWorld world{target, accomplice, shift, rate_change, original};
  if (shift.isZero(0.0) && rate_change.empty()) return world;

  Scenario& alt = world.scenario;
  const double kappa = cfg.kappa;
  const SignalDescriptor minus_change = rate_change.scaled(-1.0);

  auto assign = [&](std::size_t agent, double sign, bool drop_alpha, bool drop_beta) {
    const Eigen::VectorXd d0 = sign * shift;
    const SignalDescriptor& dd = sign > 0 ? rate_change : minus_change;
    Reference& r = alt.config.references[agent];
    r.initial = r.initial + d0;
    if (!dd.empty()) r.rate = r.rate + dd;

    SplitPair& s = alt.splits[agent];
    const SplitPair& o = original.splits[agent];
    s.beta_initial = 2.0 * r.initial - o.alpha_initial;
    const SignalDescriptor fix = correction(shift, rate_change, kappa, -sign);
    s.alpha = drop_alpha ? o.alpha : o.alpha + fix;
    // 2 f_bar - f_bar^alpha written as the original beta plus the changes.
    SignalDescriptor beta = o.beta;
    if (!dd.empty()) beta = beta + dd.scaled(2.0);
    if (!drop_alpha) beta = beta - fix;
    s.beta = drop_beta ? o.beta : beta;
  };
  assign(target, 1.0, breakage == Breakage::DropTargetAlphaCorrection, breakage == Breakage::DropTargetBetaCorrection);
  assign(accomplice, -1.0, breakage == Breakage::DropAccompliceAlphaCorrection,
         breakage == Breakage::DropAccompliceBetaCorrection);
  alt.config.id = cfg.id + "-alternate";
  return world;
}

AlternateRun simulate_alternate(const AlternateWorld& world, double horizon, double dt) {
  Scenario s = without_observers(world.scenario);
  s.config.horizon = horizon;
  s.config.dt = dt;
  AlternateRun out{run(s), {}};
  out.visible = observable(out.trace, s.config);
  return out;
}

Indistinguishability verify_indistinguishable(const ObservableTrace& a, const ObservableTrace& b, double tol) {
  if (a.times != b.times) throw ValidationError("observable traces are on different time grids");
  if (a.adjacency != b.adjacency || a.kappa != b.kappa) {
    throw ValidationError("observable traces have different topology or kappa");
  }
  Indistinguishability out;
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    const AgentMatrix diff = a.samples[k] - b.samples[k];
    if (diff.rows() != 0) out.max_deviation = std::max(out.max_deviation, diff.rowwise().norm().maxCoeff());
  }
  out.pass = out.max_deviation <= tol;
  return out;
}

double beta_offset_residual(const Trace& original, const Trace& alternate, const AlternateWorld& world) {
  if (original.times() != alternate.times()) throw ValidationError("traces are on different time grids");
  double worst = 0.0;
  for (std::size_t agent : {world.target, world.accomplice}) {
    const std::string id = std::to_string(agent + 1);
    for (std::size_t k = 0; k < original.size(); ++k) {
      const Eigen::VectorXd beta_gap = alternate.value("x_beta_" + id, k) - original.value("x_beta_" + id, k);
      const Eigen::VectorXd r_gap = alternate.value("r_" + id, k) - original.value("r_" + id, k);
      worst = std::max(worst, (beta_gap - 2.0 * r_gap).norm());
    }
  }
  return worst;
}

AuditReport run_audit(const Scenario& original, const AuditSetup& setup, double tol, Breakage breakage) {
  const std::size_t l = setup.accomplice.value_or(default_accomplice(original.config.graph, setup.target));
  const AlternateWorld world = build_alternate(original, setup.target, l, setup.shift, setup.rate_change, breakage);
  const double horizon = original.config.horizon;
  const double dt = original.config.dt;

  const AlternateWorld identity{setup.target, l, Eigen::VectorXd::Zero(setup.shift.size()),
                                SignalDescriptor(original.config.dimension()), original};
  auto base = std::async(std::launch::async, [&] { return simulate_alternate(identity, horizon, dt); });
  const AlternateRun alt = simulate_alternate(world, horizon, dt);
  const AlternateRun orig = base.get();

  AuditReport out;
  out.target = setup.target;
  out.accomplice = l;
  const Indistinguishability v = verify_indistinguishable(orig.visible, alt.visible, tol);
  out.max_deviation = v.max_deviation;
  out.beta_offset_residual = beta_offset_residual(orig.trace, alt.trace, world);
  for (std::size_t k = 0; k < orig.trace.size(); ++k) {
    out.average_residual =
        std::max(out.average_residual, (alt.trace.value("r_avg", k) - orig.trace.value("r_avg", k)).norm());
  }
  out.pass = v.pass && out.beta_offset_residual <= tol;
  return out;
}

}  // namespace privdac

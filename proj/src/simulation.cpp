#include "privdac/simulation.hpp"

#include <cmath>
#include <string>

#include "privdac/errors.hpp"
#include "privdac/integrator.hpp"

namespace privdac {

namespace {

constexpr std::size_t kRobotWidth = 4;  // s_x, s_y, theta, varpi

std::string agent_name(const char* prefix, std::size_t i) { return std::string(prefix) + std::to_string(i + 1); }

void push(std::vector<double>& row, const Eigen::Ref<const Eigen::VectorXd>& v) {
  row.insert(row.end(), v.data(), v.data() + v.size());
}

}  // namespace

CoupledSystem::CoupledSystem(const Scenario& scenario) : scenario_(&scenario) {
  const ScenarioConfig& cfg = scenario.config;
  n_ = cfg.agents();
  m_ = cfg.dimension();
  decomposed_ = cfg.mode == ConsensusMode::Decomposed;
  if (decomposed_ && scenario.splits.size() != n_) {
    throw ValidationError("decomposed scenario needs one split per agent");
  }
  std::size_t offset = (decomposed_ ? 2 : 1) * n_ * m_;
  observer_offset_ = offset;
  if (cfg.attack) {
    AttackConfig a;
    a.victim = cfg.attack->victim;
    a.k1 = cfg.attack->k1;
    a.k2 = cfg.attack->k2;
    a.k3 = cfg.attack->k3;
    a.k4 = cfg.attack->k4;
    a.kappa = cfg.kappa;
    a.graph = cfg.graph;
    a.validate();
    attack_ = std::move(a);
    offset += 4 * m_;
  }
  robot_offset_ = offset;
  if (cfg.formation) {
    offset += kRobotWidth * cfg.formation->robots.size();
    headings_.assign(cfg.formation->robots.size(), std::nullopt);
  }
  size_ = offset;
}

AgentMatrix CoupledSystem::broadcast(const Eigen::VectorXd& y) const {
  return Eigen::Map<const AgentMatrix>(y.data(), static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(m_));
}

AgentMatrix CoupledSystem::hidden(const Eigen::VectorXd& y) const {
  if (!decomposed_) return AgentMatrix(0, static_cast<Eigen::Index>(m_));
  return Eigen::Map<const AgentMatrix>(y.data() + n_ * m_, static_cast<Eigen::Index>(n_),
                                       static_cast<Eigen::Index>(m_));
}

Eigen::VectorXd CoupledSystem::initial_state() const {
  const ScenarioConfig& cfg = scenario_->config;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size_));
  const auto m = static_cast<Eigen::Index>(m_);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto row = static_cast<Eigen::Index>(i * m_);
    if (decomposed_) {
      y.segment(row, m) = scenario_->splits[i].alpha_initial;
      y.segment(static_cast<Eigen::Index>(n_ * m_) + row, m) = scenario_->splits[i].beta_initial;
    } else {
      y.segment(row, m) = cfg.references[i].initial;
    }
  }
  if (attack_) {
    const Eigen::VectorXd x = broadcast(y).row(static_cast<Eigen::Index>(attack_->victim)).transpose();
    const ObserverState obs = initial_observer(x, *attack_);
    const auto o = static_cast<Eigen::Index>(observer_offset_);
    y.segment(o, m) = obs.x_hat;
    y.segment(o + m, m) = obs.r_hat;
    y.segment(o + 2 * m, m) = obs.f_hat_prime;
    y.segment(o + 3 * m, m) = obs.z;
  }
  if (cfg.formation) {
    for (std::size_t j = 0; j < cfg.formation->robots.size(); ++j) {
      const auto base = static_cast<Eigen::Index>(robot_offset_ + kRobotWidth * j);
      const RobotPose& p = cfg.formation->robots[j].initial;
      y(base) = p.x;
      y(base + 1) = p.y;
      y(base + 2) = p.theta;
      y(base + 3) = 1.0;
    }
  }
  return y;
}

CoupledSystem::Consensus CoupledSystem::consensus_rates(double t, const Eigen::VectorXd& y) const {
  const ScenarioConfig& cfg = scenario_->config;
  const auto n = static_cast<Eigen::Index>(n_);
  const auto m = static_cast<Eigen::Index>(m_);
  Consensus out;
  if (decomposed_) {
    AgentMatrix fa(n, m), fb(n, m);
    for (std::size_t i = 0; i < n_; ++i) {
      fa.row(static_cast<Eigen::Index>(i)) = scenario_->splits[i].alpha.value(t).transpose();
      fb.row(static_cast<Eigen::Index>(i)) = scenario_->splits[i].beta.value(t).transpose();
    }
    DecomposedState d = decomposed_rhs(DecomposedState{broadcast(y), hidden(y)}, fa, fb, cfg.graph, cfg.kappa);
    out.state_rate = std::move(d.alpha);
    out.hidden_rate = std::move(d.beta);
  } else {
    AgentMatrix f(n, m);
    for (std::size_t i = 0; i < n_; ++i) f.row(static_cast<Eigen::Index>(i)) = cfg.references[i].rate.value(t).transpose();
    out.state_rate = conventional_rhs(broadcast(y), f, cfg.graph, cfg.kappa);
  }
  return out;
}

ObserverState CoupledSystem::observer(const Eigen::VectorXd& y) const {
  const auto o = static_cast<Eigen::Index>(observer_offset_);
  const auto m = static_cast<Eigen::Index>(m_);
  return ObserverState{y.segment(o, m), y.segment(o + m, m), y.segment(o + 2 * m, m), y.segment(o + 3 * m, m)};
}

RobotEvaluation CoupledSystem::robot(double t, const Eigen::VectorXd& y, std::size_t j, const AgentMatrix& x,
                                     const AgentMatrix& x_rate) const {
  const FormationSetup& f = *scenario_->config.formation;
  const auto base = static_cast<Eigen::Index>(robot_offset_ + kRobotWidth * j);
  const RobotPose pose{y(base), y(base + 1), y(base + 2)};
  const FormationAux aux{y(base + 3), f.robots[j].bias};
  const auto row = static_cast<Eigen::Index>(j);
  return evaluate_robot(t, pose, aux, x.row(row).transpose(), x_rate.row(row).transpose(), headings_[j], f.gains);
}

Eigen::VectorXd CoupledSystem::derivative(double t, const Eigen::VectorXd& y) const {
  Eigen::VectorXd dy(static_cast<Eigen::Index>(size_));
  const Consensus rates = consensus_rates(t, y);
  const auto nm = static_cast<Eigen::Index>(n_ * m_);
  dy.head(nm) = Eigen::Map<const Eigen::VectorXd>(rates.state_rate.data(), nm);
  if (decomposed_) dy.segment(nm, nm) = Eigen::Map<const Eigen::VectorXd>(rates.hidden_rate.data(), nm);

  const AgentMatrix x = broadcast(y);
  if (attack_) {
    const ObserverState d = observer_rhs(observer(y), x, *attack_);
    const auto o = static_cast<Eigen::Index>(observer_offset_);
    const auto m = static_cast<Eigen::Index>(m_);
    dy.segment(o, m) = d.x_hat;
    dy.segment(o + m, m) = d.r_hat;
    dy.segment(o + 2 * m, m) = d.f_hat_prime;
    dy.segment(o + 3 * m, m) = d.z;
  }
  for (std::size_t j = 0; j < headings_.size(); ++j) {
    const RobotEvaluation ev = robot(t, y, j, x, rates.state_rate);
    const auto base = static_cast<Eigen::Index>(robot_offset_ + kRobotWidth * j);
    dy(base) = ev.pose_rate.x;
    dy(base + 1) = ev.pose_rate.y;
    dy(base + 2) = ev.pose_rate.theta;
    dy(base + 3) = ev.varpi_rate;
  }
  return dy;
}

void CoupledSystem::commit(double t, const Eigen::VectorXd& y) {
  if (headings_.empty()) return;
  const AgentMatrix x = broadcast(y);
  const Consensus rates = consensus_rates(t, y);
  for (std::size_t j = 0; j < headings_.size(); ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    headings_[j] = desired_heading_velocity(rates.state_rate.row(row).transpose(), headings_[j]).theta_d;
  }
}

void CoupledSystem::declare_channels(Trace& trace) const {
  const ScenarioConfig& cfg = scenario_->config;
  for (std::size_t i = 0; i < n_; ++i) {
    if (decomposed_) {
      trace.add_channel(agent_name("x_alpha_", i), m_);
    } else {
      trace.add_channel(agent_name("x_", i), m_);
    }
  }
  if (decomposed_) {
    for (std::size_t i = 0; i < n_; ++i) trace.add_channel(agent_name("x_beta_", i), m_);
  }
  for (std::size_t i = 0; i < n_; ++i) trace.add_channel(agent_name("r_", i), m_);
  trace.add_channel("r_avg", m_);
  for (std::size_t i = 0; i < n_; ++i) trace.add_channel(agent_name("tracking_error_", i), 1);
  trace.add_channel("disagreement", 1);
  trace.add_channel("conservation", 1);
  if (attack_) {
    for (const char* name : {"obs_x_hat", "obs_r_hat", "obs_f_hat", "obs_z", "obs_coupling", "victim_r", "victim_f"}) {
      trace.add_channel(name, m_);
    }
  }
  if (cfg.formation) {
    for (std::size_t j = 0; j < headings_.size(); ++j) {
      for (const char* name : {"s_x_", "s_y_", "theta_", "varpi_", "e_x_", "e_y_", "e_theta_", "e_theta_bar_", "rho_",
                               "rho_dot_", "v_", "omega_", "theta_d_", "v_d_", "V_", "W_"}) {
        trace.add_channel(agent_name(name, j), 1);
      }
    }
  }
}

std::vector<double> CoupledSystem::sample_row(double t, const Eigen::VectorXd& y) const {
  const ScenarioConfig& cfg = scenario_->config;
  const auto n = static_cast<Eigen::Index>(n_);
  const auto m = static_cast<Eigen::Index>(m_);
  std::vector<double> row;
  const auto nm = static_cast<Eigen::Index>(n_ * m_);
  push(row, y.head(decomposed_ ? 2 * nm : nm));

  AgentMatrix r(n, m);
  for (std::size_t i = 0; i < n_; ++i) r.row(static_cast<Eigen::Index>(i)) = cfg.references[i].value(t).transpose();
  push(row, Eigen::Map<const Eigen::VectorXd>(r.data(), nm));
  const Eigen::VectorXd r_avg = r.colwise().mean().transpose();
  push(row, r_avg);

  const AgentMatrix x = broadcast(y);
  push(row, tracking_errors(x, r));
  if (decomposed_) {
    AgentMatrix stacked(2 * n, m);
    stacked.topRows(n) = x;
    stacked.bottomRows(n) = hidden(y);
    row.push_back(disagreement(stacked));
    row.push_back((stacked.colwise().sum() - 2.0 * r.colwise().sum()).norm());
  } else {
    row.push_back(disagreement(x));
    row.push_back((x.colwise().sum() - r.colwise().sum()).norm());
  }

  if (attack_) {
    const ObserverState obs = observer(y);
    const auto v = static_cast<Eigen::Index>(attack_->victim);
    const Eigen::VectorXd xv = x.row(v).transpose();
    const AttackEstimates est = estimates(obs, xv, *attack_);
    push(row, obs.x_hat);
    push(row, est.r_hat);
    push(row, est.f_hat);
    push(row, obs.z);
    push(row, consensus_coupling_row(x, cfg.graph, cfg.kappa, attack_->victim).transpose());
    push(row, cfg.references[attack_->victim].value(t));
    push(row, cfg.references[attack_->victim].rate.value(t));
  }

  if (!headings_.empty()) {
    const Consensus rates = consensus_rates(t, y);
    for (std::size_t j = 0; j < headings_.size(); ++j) {
      const RobotEvaluation ev = robot(t, y, j, x, rates.state_rate);
      const auto base = static_cast<Eigen::Index>(robot_offset_ + kRobotWidth * j);
      const double values[] = {y(base),         y(base + 1),           y(base + 2),           y(base + 3),
                               ev.errors.e_x,   ev.errors.e_y,         ev.errors.e_theta,     ev.errors.e_theta_bar,
                               ev.errors.rho,   ev.rho_dot,            ev.command.v,          ev.command.omega,
                               ev.heading.theta_d, ev.heading.v_d,     ev.lyapunov.v,         ev.lyapunov.w};
      row.insert(row.end(), std::begin(values), std::end(values));
    }
  }
  return row;
}

Trace run(const Scenario& scenario) {
  const ScenarioConfig& cfg = scenario.config;
  cfg.validate();
  CoupledSystem system(scenario);
  Trace trace;
  system.declare_channels(trace);

  const double steps_real = std::round(cfg.horizon / cfg.dt);
  if (steps_real > 1e9) throw ValidationError("horizon / dt exceeds 1e9 steps");
  const auto steps = static_cast<std::size_t>(steps_real);

  Eigen::VectorXd y = system.initial_state();
  system.commit(0.0, y);
  trace.append(0.0, system.sample_row(0.0, y));
  auto rhs = [&system](double t, const Eigen::VectorXd& state) { return system.derivative(t, state); };
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    y = rk4_step(rhs, t, y, cfg.dt);
    const double t_next = static_cast<double>(k + 1) * cfg.dt;
    system.commit(t_next, y);
    if ((k + 1) % cfg.sample_stride == 0 || k + 1 == steps) trace.append(t_next, system.sample_row(t_next, y));
  }
  return trace;
}

Trace run(const ScenarioConfig& config) { return run(resolve(config)); }

}  // namespace privdac

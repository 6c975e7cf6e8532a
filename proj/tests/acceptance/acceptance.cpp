// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"

#include "privdac/analysis.hpp"
#include "privdac/audit.hpp"
#include "privdac/graph.hpp"
#include "privdac/integrator.hpp"
#include "privdac/rng.hpp"
#include "privdac/scenario.hpp"
#include "privdac/signal.hpp"
#include "privdac/simulation.hpp"

using namespace privdac;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int failures = 0;

void report(int id, const char* title, double time_limit, const std::function<Verdict()>& body) {
  Stopwatch sw;
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = sw.seconds();
  const bool in_time = elapsed < time_limit;
  const bool pass = v.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %d %s: %s; runtime %.2f s (limit %g s%s)\n", pass ? "PASS" : "FAIL", id, title, v.detail.c_str(),
              elapsed, time_limit, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

std::string csv_of(const Trace& trace) {
  std::ostringstream out;
  trace.write_csv(out);
  return out.str();
}

double consensus_rate_window_fit(const Trace& trace, double horizon) {
  return fit_decay_rate(trace, "disagreement", 0.05 * horizon, 0.5 * horizon);
}

Eigen::VectorXd broadcast_average(const Trace& trace, const ScenarioConfig& cfg) {
  return summarize_consensus(trace, cfg).broadcast_average_final;
}

// Shared between criteria 4 and 5.
double conventional_attack_error = std::numeric_limits<double>::quiet_NaN();
// Shared between criteria 2 and 3.
Eigen::VectorXd conventional_value;

Verdict spectral() {
  SplitMix64 rng(20240601);
  oracle::Gen sizes(3);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto g = random_connected_graph(static_cast<std::size_t>(sizes.integer(2, 8)), rng, sizes.real(0.0, 0.8));
    if (!is_connected(g)) return {false, "generator produced a disconnected graph"};
    const auto l = laplacian(g);
    worst = std::max(worst, std::abs(predicted_decomposed_lambda2(algebraic_connectivity(l)) -
                                     algebraic_connectivity(decomposed_laplacian(l))));
  }
  return {worst <= 1e-9, "50 graphs, n in [2,8], max |predicted - eigensolver| = " + fmt(worst) + " (tol 1e-9)"};
}

Verdict consensus_correctness() {
  ScenarioConfig cfg = constant_cycle_scenario();
  cfg.horizon = 20.0;
  cfg.dt = 1e-3;
  const Trace trace = run(cfg);
  const double rate = consensus_rate_window_fit(trace, cfg.horizon);
  const double expected = cfg.kappa * algebraic_connectivity(laplacian(cfg.graph));
  const double rel = std::abs(rate - expected) / expected;
  const auto s = summarize_consensus(trace, cfg);
  conventional_value = s.broadcast_average_final;
  const bool pass = rel <= 0.10 && s.tracking_error_final_max <= 1e-4;
  return {pass, "fitted rate " + fmt(rate) + " vs kappa*lambda2 = " + fmt(expected) + " (rel " + fmt(rel) +
                    ", tol 0.10); tracking error at t=20 " + fmt(s.tracking_error_final_max) + " (tol 1e-4)"};
}

Verdict decomposition_preserves_consensus() {
  ScenarioConfig cfg = constant_cycle_scenario();
  cfg.mode = ConsensusMode::Decomposed;
  cfg.horizon = 40.0;
  const Trace trace = run(cfg);
  const double rate = consensus_rate_window_fit(trace, cfg.horizon);
  const double expected = cfg.kappa * predicted_decomposed_lambda2(algebraic_connectivity(laplacian(cfg.graph)));
  const double rel = std::abs(rate - expected) / expected;
  const Eigen::VectorXd value = broadcast_average(trace, cfg);
  Eigen::VectorXd average = Eigen::VectorXd::Zero(2);
  for (const auto& r : cfg.references) average += r.initial / 4.0;
  const double gap_conv = conventional_value.size() ? (value - conventional_value).norm() : INFINITY;
  const double tracking = summarize_consensus(trace, cfg).tracking_error_final_max;
  const bool pass = rel <= 0.10 && gap_conv <= 1e-4 && tracking <= 1e-4;
  return {pass, "fitted rate " + fmt(rate) + " vs kappa*predicted = " + fmt(expected) + " (rel " + fmt(rel) +
                    ", tol 0.10); |value - conventional value| " + fmt(gap_conv) + ", max tracking error at t=40 " +
                    fmt(tracking) + " (tol 1e-4)"};
}

Verdict attack_conventional() {
  ScenarioConfig cfg = paper_targets_scenario();
  cfg.mode = ConsensusMode::Conventional;
  cfg.audit.reset();
  const auto s = summarize_attack(run(cfg), cfg);
  conventional_attack_error = s.metrics.final_error_r;
  const bool pass = s.metrics.final_error_r <= 0.05 && s.metrics.final_error_f <= 0.05;
  return {pass, "victim 1, final quartile sup |r~| = " + fmt(s.metrics.final_error_r) + ", sup |f~| = " +
                    fmt(s.metrics.final_error_f) + " (tol 0.05 each)"};
}

Verdict attack_decomposed() {
  ScenarioConfig cfg = paper_targets_scenario();
  cfg.mode = ConsensusMode::Decomposed;
  cfg.audit.reset();
  const Scenario sc = resolve(cfg);
  const std::size_t v = cfg.attack->victim;
  const double offset = (sc.splits[v].alpha_initial - cfg.references[v].initial).norm();
  const auto s = summarize_attack(run(sc), cfg);
  const double floor = 10.0 * conventional_attack_error;
  const bool pass = offset >= 2.0 && s.metrics.final_min_error_r >= floor && s.metrics.late_to_early_ratio >= 0.9;
  return {pass, "split offset |alpha_1(0) - r_1(0)| = " + fmt(offset) + " (need >= 2); final quartile inf |r~| = " +
                    fmt(s.metrics.final_min_error_r) + " (need >= 10 x " + fmt(conventional_attack_error) +
                    "); late/early mean ratio " + fmt(s.metrics.late_to_early_ratio) + " (need >= 0.9)"};
}

Verdict indistinguishability() {
  ScenarioConfig cfg = paper_targets_scenario();
  cfg.attack.reset();
  cfg.audit.reset();
  cfg.horizon = 20.0;
  cfg.dt = 1e-3;
  const Scenario sc = resolve(cfg);
  const double horizon = cfg.horizon, dt = cfg.dt;
  const auto identity = build_alternate(sc, 0, 1, Eigen::Vector2d::Zero(), SignalDescriptor(2));
  const auto orig = simulate_alternate(identity, horizon, dt);

  oracle::Gen gen(606);
  double worst_dev = 0.0, worst_beta = 0.0;
  for (int k = 0; k < 10; ++k) {
    Eigen::Vector2d shift(gen.real(-1, 1), gen.real(-1, 1));
    shift *= gen.real(0.5, 10.0) / shift.norm();
    const auto world = build_alternate(sc, 0, 1, shift, SignalDescriptor(2));
    const auto alt = simulate_alternate(world, horizon, dt);
    worst_dev = std::max(worst_dev, verify_indistinguishable(orig.visible, alt.visible, 1e-6).max_deviation);
    worst_beta = std::max(worst_beta, beta_offset_residual(orig.trace, alt.trace, world));
  }

  const auto broken = build_alternate(sc, 0, 1, Eigen::Vector2d(1.0, 0.0), SignalDescriptor(2),
                                      Breakage::DropTargetAlphaCorrection);
  const auto bad = simulate_alternate(broken, 5.0, dt);
  const auto orig5 = simulate_alternate(identity, 5.0, dt);
  const double control = verify_indistinguishable(orig5.visible, bad.visible, 1e-6).max_deviation;

  const bool pass = worst_dev <= 1e-6 && worst_beta <= 1e-6 && control > 1e-2;
  return {pass, "10 shifts over 20 s: max alpha deviation " + fmt(worst_dev) + " (tol 1e-6), beta identity residual " +
                    fmt(worst_beta) + " (tol 1e-6); dropped f_bar_p^alpha correction deviates " + fmt(control) +
                    " by t=5 (need > 1e-2)"};
}

Verdict formation() {
  const ScenarioConfig cfg = paper_formation_scenario();
  const auto f = summarize_formation(run(cfg), cfg);
  const bool pass = f.error_final_max <= 0.05 && f.w_final_mean_max <= 1e-3 && f.v_bound_ratio_max <= 1.1;
  return {pass, "60 s, max |e_x|,|e_y|,|e_theta| over last 5 s " + fmt(f.error_final_max) +
                    " (tol 0.05); max last-10 s mean W " + fmt(f.w_final_mean_max) +
                    " (tol 1e-3); max V / bound " + fmt(f.v_bound_ratio_max) + " (tol 1.1)"};
}

Verdict numerical_engine() {
  auto terminal_error = [](double dt) {
    Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
    const int steps = static_cast<int>(std::lround(2.0 / dt));
    for (int k = 0; k < steps; ++k) {
      y = rk4_step([](double, const Eigen::VectorXd& v) { return Eigen::VectorXd(-v); }, k * dt, y, dt);
    }
    return std::abs(y(0) - std::exp(-2.0));
  };
  const double ratio = terminal_error(0.1) / terminal_error(0.05);

  oracle::Gen gen(808);
  double worst_fd = 0.0;
  for (int k = 0; k < 100; ++k) {
    SignalDescriptor s(2);
    s.add(ConstantTerm{0, gen.real(-3, 3)});
    s.add(SinusoidTerm{static_cast<std::size_t>(gen.integer(0, 1)), gen.real(-2, 2), gen.real(0.05, 3),
                       gen.real(0, 6.28), gen.coin() ? Wave::Sin : Wave::Cos});
    s.add(RotatingTerm{0, gen.real(0.2, 1.0), gen.real(0, 0.4), gen.real(0.05, 1), gen.real(-3, 3), gen.real(0, 1),
                       gen.real(0.05, 1)});
    if (gen.coin()) s = s + paper_targets()[static_cast<std::size_t>(gen.integer(0, 3))].rate;
    const double t = gen.real(0, 60);
    const Eigen::VectorXd d = s.derivative(t);
    for (int c = 0; c < 2; ++c) {
      const double fd = oracle::central_difference([&](double u) { return s.value(u)(c); }, t, 1e-5);
      worst_fd = std::max(worst_fd, std::abs(fd - d(c)));
    }
  }

  ScenarioConfig cfg = paper_formation_scenario();
  cfg.attack = AttackSetup{};
  cfg.horizon = 2.0;
  const bool identical = csv_of(run(cfg)) == csv_of(run(cfg));

  const bool pass = ratio >= 12.0 && ratio <= 20.0 && worst_fd <= 1e-6 && identical;
  return {pass, "RK4 error ratio on x' = -x " + fmt(ratio) + " (need [12,20]); max |FD - analytic| " +
                    fmt(worst_fd) + " over 100 signals (tol 1e-6); repeated CSV " +
                    (identical ? "byte-identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  report(1, "spectral formula", 1.0, spectral);
  report(2, "consensus correctness", 5.0, consensus_correctness);
  report(3, "decomposition preserves consensus", 5.0, decomposition_preserves_consensus);
  report(4, "attack succeeds on conventional protocol", 30.0, attack_conventional);
  report(5, "attack fails on decomposed protocol", 30.0, attack_decomposed);
  report(6, "constructive indistinguishability", 60.0, indistinguishability);
  report(7, "formation tracking", 60.0, formation);
  report(8, "numerical engine", 5.0, numerical_engine);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

#include "privdac/audit.hpp"
#include "privdac/errors.hpp"
#include "privdac/scenario.hpp"
#include "privdac/simulation.hpp"

using namespace privdac;

namespace {

Scenario base_scenario(std::uint64_t seed = 7) {
  ScenarioConfig cfg = paper_targets_scenario();
  cfg.attack.reset();
  cfg.audit.reset();
  cfg.seed = seed;
  return resolve(cfg);
}

std::string csv_of(const Trace& trace) {
  std::ostringstream out;
  trace.write_csv(out);
  return out.str();
}

SignalDescriptor random_rate_change(oracle::Gen& gen) {
  SignalDescriptor d(2);
  if (gen.coin()) {
    d.add(SinusoidTerm{static_cast<std::size_t>(gen.integer(0, 1)), gen.real(-1, 1), gen.real(0.1, 1.0),
                       gen.real(0, 6.28), gen.coin() ? Wave::Cos : Wave::Sin});
  }
  return d;
}

}  // namespace

TEST_CASE("identity alternate reproduces the original bit for bit") {
  const Scenario sc = base_scenario();
  const auto world = build_alternate(sc, 0, 1, Eigen::Vector2d::Zero(), SignalDescriptor(2));
  CHECK(world.scenario.config.references == sc.config.references);
  CHECK(world.scenario.splits == sc.splits);
  const auto alt = simulate_alternate(world, 2.0, 1e-3);

  Scenario plain = sc;
  plain.config.horizon = 2.0;
  CHECK(csv_of(alt.trace) == csv_of(run(plain)));
}

TEST_CASE("alternate assignments") {
  const Scenario sc = base_scenario();
  const Eigen::Vector2d shift(1.0, 0.0);
  const auto world = build_alternate(sc, 0, 1, shift, SignalDescriptor(2));
  const auto& alt = world.scenario;
  CHECK(alt.config.references[0].initial == sc.config.references[0].initial + shift);
  CHECK(alt.config.references[1].initial == sc.config.references[1].initial - shift);
  Eigen::Vector2d before = Eigen::Vector2d::Zero(), after = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < 4; ++i) {
    before += sc.config.references[i].initial;
    after += alt.config.references[i].initial;
    CHECK(alt.splits[i].alpha_initial == sc.splits[i].alpha_initial);
    // Equal up to the rounding of beta(0) = 2 r(0) - alpha(0).
    CHECK((alt.splits[i].alpha_initial + alt.splits[i].beta_initial - 2.0 * alt.config.references[i].initial).norm() <=
          1e-14);
  }
  CHECK((before - after).norm() <= 1e-15);
  for (std::size_t i : {2u, 3u}) {
    CHECK(alt.splits[i] == sc.splits[i]);
    CHECK(alt.config.references[i] == sc.config.references[i]);
  }
  // f_bar_p^alpha = f_p^alpha - 2 kappa shift, and the split still sums to 2 f_bar.
  const double kappa = sc.config.kappa;
  for (double t : {0.0, 3.0, 11.0}) {
    CHECK((alt.splits[0].alpha.value(t) - (sc.splits[0].alpha.value(t) - 2 * kappa * shift)).norm() <= 1e-12);
    CHECK((alt.splits[1].alpha.value(t) - (sc.splits[1].alpha.value(t) + 2 * kappa * shift)).norm() <= 1e-12);
    for (std::size_t i : {0u, 1u}) {
      const Eigen::VectorXd sum = alt.splits[i].alpha.value(t) + alt.splits[i].beta.value(t);
      CHECK((sum - 2.0 * alt.config.references[i].rate.value(t)).norm() <= 1e-12);
    }
  }
}

TEST_CASE("build_alternate preconditions") {
  const Scenario sc = base_scenario();
  const Eigen::Vector2d shift(1.0, 0.0);
  CHECK_THROWS_AS(build_alternate(sc, 0, 2, shift, SignalDescriptor(2)), ValidationError);
  CHECK_THROWS_AS(build_alternate(sc, 0, 1, shift, SignalDescriptor(2, {RampTerm{0, 1.0}})), ValidationError);
  CHECK_THROWS_AS(build_alternate(sc, 0, 1, Eigen::Vector3d::Zero(), SignalDescriptor(2)), ValidationError);
  ScenarioConfig conv = sc.config;
  conv.mode = ConsensusMode::Conventional;
  CHECK_THROWS_AS(build_alternate(resolve(conv), 0, 1, shift, SignalDescriptor(2)), ValidationError);
  CHECK(default_accomplice(sc.config.graph, 0) == 1);
  CHECK(default_accomplice(sc.config.graph, 2) == 1);
}

TEST_CASE("shifted world is invisible and satisfies the beta identities") {
  const Scenario sc = base_scenario();
  const Eigen::Vector2d shift(1.0, 0.0);
  const auto world = build_alternate(sc, 0, 1, shift, SignalDescriptor(2));
  const auto identity = build_alternate(sc, 0, 1, Eigen::Vector2d::Zero(), SignalDescriptor(2));
  const auto orig = simulate_alternate(identity, 5.0, 1e-3);
  const auto alt = simulate_alternate(world, 5.0, 1e-3);
  const auto v = verify_indistinguishable(orig.visible, alt.visible, 1e-6);
  CHECK(v.pass);
  CHECK(v.max_deviation <= 1e-6);
  CHECK(beta_offset_residual(orig.trace, alt.trace, world) <= 1e-6);

  // The accomplice's identity written out: beta_bar_l - beta_l = 2 (r_p - r_bar_p).
  for (std::size_t k = 0; k < orig.trace.size(); k += 50) {
    const Eigen::VectorXd gap = alt.trace.value("x_beta_2", k) - orig.trace.value("x_beta_2", k);
    const Eigen::VectorXd dp = orig.trace.value("r_1", k) - alt.trace.value("r_1", k);
    CHECK((gap - 2.0 * dp).norm() <= 1e-6);
  }
  // The target's reference really is different.
  CHECK((alt.trace.value("r_1", 0) - orig.trace.value("r_1", 0)).norm() == doctest::Approx(1.0));
}

TEST_CASE("property: random shifts, rate changes and seeds") {
  oracle::Gen gen(61);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scenario sc = base_scenario(seed);
    const auto identity = build_alternate(sc, 0, 1, Eigen::Vector2d::Zero(), SignalDescriptor(2));
    const auto orig = simulate_alternate(identity, 4.0, 1e-3);
    for (int k = 0; k < 10; ++k) {
      const std::size_t target = static_cast<std::size_t>(gen.integer(0, 3));
      const auto& nb = sc.config.graph.neighbors(target);
      const std::size_t accomplice = nb[static_cast<std::size_t>(gen.integer(0, static_cast<int>(nb.size()) - 1))];
      Eigen::Vector2d shift(gen.real(-1, 1), gen.real(-1, 1));
      shift *= gen.real(0.0, 10.0) / shift.norm();
      const auto world = build_alternate(sc, target, accomplice, shift, random_rate_change(gen));
      const auto alt = simulate_alternate(world, 4.0, 1e-3);
      CAPTURE(seed);
      CAPTURE(k);
      CHECK(verify_indistinguishable(orig.visible, alt.visible, 1e-6).pass);
      CHECK(beta_offset_residual(orig.trace, alt.trace, world) <= 1e-6);
    }
  }
}

TEST_CASE("average is preserved for constant references") {
  ScenarioConfig cfg = constant_cycle_scenario();
  cfg.mode = ConsensusMode::Decomposed;
  cfg.horizon = 40.0;
  cfg.sample_stride = 1000;
  const Scenario sc = resolve(cfg);
  AuditSetup setup;
  setup.target = 2;
  setup.shift = Eigen::Vector2d(-3.0, 4.0);
  setup.rate_change = SignalDescriptor(2);
  const AuditReport report = run_audit(sc, setup, 1e-6);
  CHECK(report.pass);
  CHECK(report.accomplice == 1);
  CHECK(report.average_residual <= 1e-12);

  const auto world = build_alternate(sc, 2, 1, setup.shift, setup.rate_change);
  const auto alt = simulate_alternate(world, 40.0, 1e-3);
  Eigen::Vector2d avg = Eigen::Vector2d::Zero();
  for (const auto& r : cfg.references) avg += r.initial / 4.0;
  for (std::size_t i = 1; i <= 4; ++i) {
    CHECK((alt.trace.value("x_alpha_" + std::to_string(i), alt.trace.size() - 1) - avg).norm() <= 1e-6);
  }
}

TEST_CASE("negative controls: each dropped correction is visible by t = 5") {
  const Scenario sc = base_scenario();
  const auto identity = build_alternate(sc, 0, 1, Eigen::Vector2d::Zero(), SignalDescriptor(2));
  const auto orig = simulate_alternate(identity, 5.0, 1e-3);
  for (Breakage b : {Breakage::DropTargetAlphaCorrection, Breakage::DropTargetBetaCorrection,
                     Breakage::DropAccompliceAlphaCorrection, Breakage::DropAccompliceBetaCorrection}) {
    const auto world = build_alternate(sc, 0, 1, Eigen::Vector2d(1.0, 0.0), SignalDescriptor(2), b);
    const auto alt = simulate_alternate(world, 5.0, 1e-3);
    const auto v = verify_indistinguishable(orig.visible, alt.visible, 1e-6);
    CAPTURE(static_cast<int>(b));
    CHECK_FALSE(v.pass);
    CHECK(v.max_deviation > 1e-2);
  }
}

TEST_CASE("verify_indistinguishable") {
  ObservableTrace a;
  a.kappa = 5.0;
  a.adjacency = graph_from_preset("cycle(4)").adjacency();
  a.times = {0.0, 0.5};
  a.samples = {AgentMatrix::Zero(4, 2), AgentMatrix::Ones(4, 2)};
  auto r = verify_indistinguishable(a, a, 0.0);
  CHECK(r.pass);
  CHECK(r.max_deviation == 0.0);

  ObservableTrace b = a;
  b.samples[1](2, 0) += 3.0;
  b.samples[1](2, 1) += 4.0;
  r = verify_indistinguishable(a, b, 1e-6);
  CHECK_FALSE(r.pass);
  CHECK(r.max_deviation == doctest::Approx(5.0));

  ObservableTrace grid = a;
  grid.times[1] = 0.6;
  CHECK_THROWS_AS(verify_indistinguishable(a, grid, 1e-6), ValidationError);
  ObservableTrace topo = a;
  topo.adjacency = graph_from_preset("complete(4)").adjacency();
  CHECK_THROWS_AS(verify_indistinguishable(a, topo, 1e-6), ValidationError);
  ObservableTrace gain = a;
  gain.kappa = 4.0;
  CHECK_THROWS_AS(verify_indistinguishable(a, gain, 1e-6), ValidationError);
}

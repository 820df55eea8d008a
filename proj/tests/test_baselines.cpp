// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "isac/baselines.hpp"
#include "isac/harness.hpp"
#include "isac/scenario.hpp"

using namespace isac;

namespace {

// Users with perfect initial CSI and no channel evolution; targets without process noise.
ScenarioSpec static_spec(int K, int Q) {
  ScenarioSpec s = preset_spec("desk");
  s.users.resize(K);
  for (auto& u : s.users) {
    u.rho = 1.0;
    u.varsigma_ratio = 0.0;
  }
  s.targets.resize(Q);
  for (auto& t : s.targets) t.rho_tilde = 0.0;
  return s;
}

}  // namespace

TEST_CASE("exhaustive search skips pilots when prediction is exact") {
  const Scenario sc = build_scenario(static_spec(1, 0));
  World w = make_world(sc, 61);
  for (int n = 0; n < 5; ++n) {
    FrameContext ctx = prepare_frame(sc, w);
    const ExhaustiveChoice e = exhaustive_decision(sc, ctx, Beamformer::FpSca);
    CHECK(e.d.a_c == Bits{0});
    commit(sc, w, ctx, e.d.a_c, e.d.a_r, e.result.W);
  }
}

TEST_CASE("exhaustive search equals an independent enumeration") {
  ScenarioSpec spec = preset_spec("desk");
  spec.users.resize(2);
  spec.targets.resize(1);
  const Scenario sc = build_scenario(spec);
  World w = make_world(sc, 62);
  Rng rng(63);
  for (int n = 0; n < 8; ++n) {
    FrameContext ctx = prepare_frame(sc, w);
    const ExhaustiveChoice e = exhaustive_decision(sc, ctx, Beamformer::FpSca);
    double best = -1e300;
    Bits bc, br;
    for (int m = 0; m < 8; ++m) {
      const Bits a_c{std::uint8_t(m >> 2 & 1), std::uint8_t(m >> 1 & 1)};
      const Bits a_r{std::uint8_t(m & 1)};
      FrameContext fresh = prepare_frame(sc, w);
      const P2Instance inst = frame_instance(sc, fresh, a_c, a_r);
      double u;
      try {
        u = solve_p2(inst, sc.solver, sc.sys.delta_s).utility;
      } catch (const Error&) {
        continue;
      }
      if (u > best) {
        best = u;
        bc = a_c;
        br = a_r;
      }
    }
    CHECK(e.d.a_c == bc);
    CHECK(e.d.a_r == br);
    CHECK(e.result.utility == best);

    // The exhaustive optimum dominates every other policy on the same frame.
    const DecisionPair rd = random_decision(2, 1, sc.sys.max_estimated_users(), rng);
    CHECK(e.result.utility >= solve_pair(sc, ctx, rd.a_c, rd.a_r, Beamformer::FpSca).utility);
    const DecisionPair all = all_update_decision(sc);
    CHECK(e.result.utility >= solve_pair(sc, ctx, all.a_c, all.a_r, Beamformer::FpSca).utility);
    commit(sc, w, ctx, e.d.a_c, e.d.a_r, e.result.W);
  }
}

TEST_CASE("random baseline") {
  Rng rng(64);
  long ones = 0, total = 0;
  for (int i = 0; i < 10000; ++i) {
    const DecisionPair d = random_decision(3, 2, 3, rng);
    CHECK(d.a_c.size() == 3);
    CHECK(d.a_r.size() == 2);
    ones += popcount(d.a_c) + popcount(d.a_r);
    total += 5;
  }
  CHECK(std::abs(double(ones) / total - 0.5) < 0.02);

  Rng a(65), b(65);
  for (int i = 0; i < 100; ++i) {
    const DecisionPair x = random_decision(3, 2, 1, a), y = random_decision(3, 2, 1, b);
    CHECK(x.a_c == y.a_c);
    CHECK(x.a_r == y.a_r);
    CHECK(popcount(x.a_c) <= 1);
  }
}

TEST_CASE("all-update baseline") {
  const Scenario sc = make_scenario("desk");
  const DecisionPair d = all_update_decision(sc);
  CHECK(d.a_c == Bits{1, 1, 1});
  CHECK(d.a_r == Bits{1, 1});
  CHECK(pilot_overhead(sc, d.a_c) == 3 * sc.sys.D);

  ScenarioSpec s = preset_spec("desk");
  s.sys.D = s.sys.M / 2;
  s.users.resize(2);
  const Scenario tight = build_scenario(s);
  s.users.resize(3);
  CHECK_THROWS_AS(build_scenario(s), ConfigError);
  CHECK_NOTHROW(all_update_decision(tight));
}

TEST_CASE("FP/SCA dominates MRT frame by frame under all-update") {
  const Scenario sc = make_scenario("desk");
  RunManifest m;
  m.spec = sc.spec;
  m.seed = 66;
  m.policies = {"all", "all-mrt"};
  m.frames = 15;
  const ExperimentResult r = run_experiment(sc, m);
  const auto& fp = r.records.at("all");
  const auto& mrt = r.records.at("all-mrt");
  REQUIRE(fp.size() == 15);
  for (std::size_t i = 0; i < fp.size(); ++i) CHECK(fp[i].U_genie >= mrt[i].U_genie - 1e-6);
}

TEST_CASE("policy parsing") {
  CHECK(parse_policy("drol").policy == Policy::Drol);
  CHECK(parse_policy("exhaustive-mrt").bf == Beamformer::Mrt);
  CHECK(parse_policy("all").policy == Policy::AllUpdate);
  CHECK(parse_policy("random").name() == "random");
  CHECK_THROWS_AS(parse_policy("greedy"), ConfigError);
}

TEST_CASE("learner settles on prediction when prediction is exact" * doctest::timeout(600)) {
  ScenarioSpec spec = static_spec(3, 2);
  spec.experiment.frames = 3000;
  const Scenario sc = build_scenario(spec);
  World w = make_world(sc, 67);
  DrolState s = make_drol_state(sc, 67);
  long estimates = 0;
  for (int n = 1; n <= sc.frames(); ++n) {
    FrameContext ctx = prepare_frame(sc, w);
    const FrameRecord r = run_drol_frame(sc, w, s, ctx, {Beamformer::FpSca, false});
    if (n > sc.frames() - 500) estimates += popcount(r.a_c);
  }
  CHECK(double(estimates) / (500.0 * 3) < 0.01);
}

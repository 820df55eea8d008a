// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "isac/scenario.hpp"

using namespace isac;
using doctest::Approx;

TEST_CASE("db_to_linear") {
  CHECK(db_to_linear(0) == 1.0);
  CHECK(db_to_linear(30) == Approx(1000.0).epsilon(1e-12));
  CHECK(db_to_linear(-74.2) == Approx(3.802e-8).epsilon(1e-3));
}

TEST_CASE("paper preset values") {
  const Scenario sc = make_scenario("paper");
  REQUIRE(sc.K() == 6);
  REQUIRE(sc.Q() == 3);
  CHECK(sc.users[0].rho == 0.99);
  CHECK(sc.users[5].rho == 0.8);
  const Vec3 x0 = sc.targets[0].x0;
  CHECK(x0(0) == Approx(std::numbers::pi / 4));
  CHECK(x0(1) == 150);
  CHECK(x0(2) == 30);
  CHECK(sc.drol.hidden == std::vector<int>{1024, 1024, 258, 64});

  const double mt = sc.sys.M * sc.sys.T;
  const double rho_tilde[] = {0.05, 1.0, 5.0};
  for (int q = 0; q < 3; ++q) {
    const double ev = 0.5 * rho_tilde[q] * mt;
    const Vec3 s = sc.targets[q].sigma_eps;
    CHECK(s(2) == Approx(ev).epsilon(1e-12));
    CHECK(s(1) == Approx(0.5 * rho_tilde[q] * ev).epsilon(1e-12));
    CHECK(s(0) == Approx(1e-4 * rho_tilde[q] * mt).epsilon(1e-12));
  }
}

TEST_CASE("desk preset dimensions") {
  const Scenario sc = make_scenario("desk");
  CHECK(sc.K() == 3);
  CHECK(sc.Q() == 2);
  CHECK(sc.sys.L_T == 8);
  CHECK(sc.sys.L_R == 8);
  CHECK(sc.frames() == 3000);
  CHECK(sc.drol.hidden == std::vector<int>{128, 64});
}

TEST_CASE("every preset passes its invariants") {
  for (const char* p : {"paper", "desk"}) {
    const Scenario sc = make_scenario(p);
    CHECK_NOTHROW(sc.sys.validate());
    for (const auto& u : sc.users) CHECK_NOTHROW(u.validate());
    for (const auto& t : sc.targets) {
      CHECK_NOTHROW(t.validate());
      Eigen::SelfAdjointEigenSolver<Mat3> es(t.M0);
      CHECK(es.eigenvalues().minCoeff() > 0);
    }
  }
  CHECK_THROWS_AS(make_scenario("nope"), ConfigError);
}

TEST_CASE("system validation rejects inconsistent timing and pilot budgets") {
  SystemConfig c;
  c.T_cp = 1e-6;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  SystemConfig d;
  d.L_R = 1;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  ScenarioSpec s = preset_spec("desk");
  s.sys.D = s.sys.M;  // three users cannot all fit
  CHECK_THROWS_AS(build_scenario(s), ConfigError);
}

TEST_CASE("config json round trip and overrides") {
  const ScenarioSpec a = preset_spec("desk");
  const ScenarioSpec b = spec_from_json_text(spec_to_json_text(a));
  CHECK(spec_to_json_text(a) == spec_to_json_text(b));

  const ScenarioSpec c = spec_from_json_text(
      R"({"preset": "desk", "system": {"D": 20}, "users": [{"rho": 0.5, "distance": 500}],
          "solver": {"w_update_mode": "prox-linear"}, "experiment": {"frames": 7}})");
  CHECK(c.sys.D == 20);
  REQUIRE(c.users.size() == 1);
  CHECK(c.users[0].rho == 0.5);
  CHECK(c.solver.mode == WUpdateMode::ProxLinear);
  CHECK(build_scenario(c).frames() == 7);
  CHECK_THROWS(spec_from_json_text("{not json"));
}

TEST_CASE("enum string conversions") {
  CHECK(w_update_mode_from_string("prox-linear") == WUpdateMode::ProxLinear);
  CHECK(w_update_mode_from_string(to_string(WUpdateMode::Lagrangian)) == WUpdateMode::Lagrangian);
  CHECK(refine_basis_from_string("candidate-count") == RefineBasis::CandidateCount);
  CHECK_THROWS_AS(refine_basis_from_string("x"), ConfigError);
}

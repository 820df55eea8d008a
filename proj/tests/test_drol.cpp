// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "isac/baselines.hpp"
#include "isac/drol.hpp"
#include "isac/mlp.hpp"
#include "isac/scenario.hpp"

using namespace isac;
using doctest::Approx;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Bits bits(std::initializer_list<int> v) {
  Bits b;
  for (int x : v) b.push_back(static_cast<std::uint8_t>(x));
  return b;
}

}  // namespace

TEST_CASE("order-preserving quantizer") {
  const auto out = order_preserving_quantize(vec({0.2, 0.6, 0.45}), 3);
  REQUIRE(out.size() == 3);
  CHECK(out[0] == bits({0, 1, 0}));
  CHECK(out[1] == bits({0, 1, 1}));
  CHECK(out[2] == bits({0, 0, 0}));
  CHECK(order_preserving_quantize(vec({0.5, 0.9, 0.7}), 1)[0] == bits({1, 1, 1}));

  Rng rng(41);
  for (int t = 0; t < 2000; ++t) {
    const int X = 7 + int(rng.index(6));
    VectorXd a(X);
    for (int l = 0; l < X; ++l) a(l) = rng.bernoulli(0.2) ? 0.5 : rng.uniform();
    const auto c = order_preserving_quantize(a, X + 1);
    CHECK(c.size() == std::size_t(X + 1));
    for (int l = 0; l < X; ++l) CHECK(c[0][l] == (a(l) >= 0.5));
    for (const auto& b : c) CHECK(is_order_preserving(a, b));
  }
}

TEST_CASE("candidate generation") {
  Rng rng(42);
  const VectorXd a = vec({0.1, 0.8, 0.4});
  CHECK(generate_candidates(a, 3, 0.0, rng).count() == 3);
  CHECK(generate_candidates(a, 3, 1.0, rng).count() == 6);
  int noisy = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) noisy += generate_candidates(a, 2, 0.3, rng).noisy;
  CHECK(double(noisy) / n == Approx(0.3).epsilon(0.05));
  CHECK(std::abs(double(noisy) / n - 0.3) <= 0.015);
  CHECK(exhaustive_candidates(2) ==
        std::vector<Bits>{bits({0, 0}), bits({0, 1}), bits({1, 0}), bits({1, 1})});
}

TEST_CASE("practical decision") {
  CHECK(practical_decision({bits({1, 0, 1})}) == bits({1, 0, 1}));
  const Scenario sc = make_scenario("desk");
  const Bits p = practical_decision({bits({1, 0, 0}), bits({0, 1, 0})});
  CHECK(p == bits({1, 1, 0}));
  CHECK(pilot_overhead(sc, p) == 2 * sc.sys.D);
  CHECK(practical_decision({bits({1, 0, 0}), bits({1, 1, 0})}) == bits({1, 1, 0}));
}

TEST_CASE("exploration refinement") {
  CHECK(refined_count({1, 2, 1, 2}, {3, 3, 3, 3}, 1.0, 3) == 2);
  CHECK(refined_count({3, 3, 6, 3}, {3, 3, 3, 3}, 1.0, 3) == 1);
  ActorParams a;
  a.A_c = 1.9;
  a.K_tilde_c = 2;
  a.Delta_c = 4;
  a.Delta_r = 4;
  refine_exploration_params(a, 1, RefineBasis::Dimension, 3, 2);
  CHECK(a.P_c == Approx(0.05).epsilon(1e-12));
  const ActorParams init = initial_actor(DrolConfig{}, 3, 2);
  CHECK(init.K_tilde_c == 4);
  CHECK(init.K_tilde_r == 3);
}

TEST_CASE("critic selection") {
  const std::vector<Bits> c{bits({0})}, r{bits({1})};
  P2Result fixed;
  fixed.utility = 3.5;
  const CriticChoice one = critic_select(c, r, [&](const Bits&, const Bits&) -> const P2Result& {
    return fixed;
  });
  CHECK(one.i == 0);
  CHECK(one.j == 0);
  CHECK(one.result.utility == 3.5);

  const std::vector<Bits> cc{bits({0}), bits({1})}, rr{bits({0}), bits({1})};
  const CriticChoice tie = critic_select(cc, rr, [&](const Bits&, const Bits&) -> const P2Result& {
    return fixed;
  });
  CHECK(tie.i == 0);
  CHECK(tie.j == 0);

  // K=2, Q=1 with every combination: the critic equals plain enumeration.
  ScenarioSpec spec = preset_spec("desk");
  spec.users.resize(2);
  spec.targets.resize(1);
  const Scenario sc = build_scenario(spec);
  World w = make_world(sc, 43);
  for (int n = 0; n < 5; ++n) {
    FrameContext ctx = prepare_frame(sc, w);
    const auto all_c = exhaustive_candidates(2), all_r = exhaustive_candidates(1);
    const CriticChoice ch = critic_select(all_c, all_r, [&](const Bits& a, const Bits& b) -> const P2Result& {
      return solve_pair(sc, ctx, a, b, Beamformer::FpSca);
    });
    double best = -1e300;
    int bi = -1, bj = -1;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j) {
        FrameContext fresh = prepare_frame(sc, w);
        const double u = solve_pair(sc, fresh, all_c[i], all_r[j], Beamformer::FpSca).utility;
        if (u > best) {
          best = u;
          bi = i;
          bj = j;
        }
      }
    CHECK(ch.i == bi);
    CHECK(ch.j == bj);
    CHECK(ch.result.utility == best);
    commit(sc, w, ctx, all_c[ch.i], all_r[ch.j], ch.result.W);
  }
}

TEST_CASE("mlp forward") {
  Rng rng(44);
  Mlp net = Mlp::create({4, 6, 3}, 0.3, rng);
  for (auto& W : net.weights) W.setZero();
  for (auto& b : net.biases) b.setZero();
  const VectorXd out = net.forward(VectorXd(VectorXd::Random(4)));
  for (int i = 0; i < 3; ++i) CHECK(out(i) == 0.5);

  Mlp r = Mlp::create({5, 8, 7, 2}, 0.3, rng);
  const VectorXd x = VectorXd::Random(5);
  CHECK(r.forward(x) == r.forward(x));
  // Logistic output is 1/4-Lipschitz; leaky rectifiers are 1-Lipschitz.
  double L = 0.25;
  for (const auto& W : r.weights) L *= W.operatorNorm();
  for (int t = 0; t < 200; ++t) {
    const VectorXd d = 1e-2 * VectorXd::Random(5);
    CHECK((r.forward(VectorXd(x + d)) - r.forward(x)).norm() <= L * d.norm() * (1 + 1e-12));
  }
  CHECK(r.parameter_count() == std::size_t(5 * 8 + 8 + 8 * 7 + 7 + 7 * 2 + 2));
}

TEST_CASE("bce loss") {
  Rng rng(45);
  Mlp net = Mlp::create({3, 4, 2}, 0.3, rng);
  for (auto& W : net.weights) W.setZero();
  for (auto& b : net.biases) b.setZero();
  MatrixXd X = MatrixXd::Random(3, 5), Y(2, 5);
  Y << 1, 0, 1, 0, 1, 0, 0, 1, 1, 1;
  CHECK(bce_loss_and_grad(net, X, Y, nullptr) == Approx(2 * std::log(2.0)).epsilon(1e-12));
  net.biases.back() << 40, -40;
  MatrixXd Yp(2, 5);
  Yp.row(0).setOnes();
  Yp.row(1).setZero();
  CHECK(bce_loss_and_grad(net, X, Yp, nullptr) < 1e-6);

  // Central differences on a three-layer toy net.
  Mlp toy = Mlp::create({3, 5, 4, 2}, 0.3, rng);
  MlpGrads g;
  bce_loss_and_grad(toy, X, Y, &g);
  double num = 0, den = 0;
  for (std::size_t l = 0; l < toy.weights.size(); ++l)
    for (int i = 0; i < toy.weights[l].size(); ++i) {
      double& p = toy.weights[l](i);
      const double keep = p;
      p = keep + 1e-6;
      const double fp = bce_loss_and_grad(toy, X, Y, nullptr);
      p = keep - 1e-6;
      const double fm = bce_loss_and_grad(toy, X, Y, nullptr);
      p = keep;
      const double fd = (fp - fm) / 2e-6;
      num += (fd - g.weights[l](i)) * (fd - g.weights[l](i));
      den += g.weights[l](i) * g.weights[l](i);
    }
  CHECK(std::sqrt(num / den) < 1e-4);
}

TEST_CASE("adam") {
  Rng rng(46);
  Mlp net = Mlp::create({2, 3, 1}, 0.3, rng);
  Adam adam = Adam::create(net, 1e-3);
  const Mlp before = net;
  MlpGrads zero{{}, {}};
  for (const auto& W : net.weights) zero.weights.push_back(MatrixXd::Zero(W.rows(), W.cols()));
  for (const auto& b : net.biases) zero.biases.push_back(VectorXd::Zero(b.size()));
  adam.step(net, zero);
  for (std::size_t l = 0; l < net.weights.size(); ++l) CHECK(net.weights[l] == before.weights[l]);

  Adam fresh = Adam::create(net, 1e-3);
  const Mlp pre = net;
  MlpGrads unit = zero;
  for (auto& W : unit.weights) W.setOnes();
  for (auto& b : unit.biases) b.setOnes();
  fresh.step(net, unit);
  for (std::size_t l = 0; l < net.weights.size(); ++l)
    for (int i = 0; i < net.weights[l].size(); ++i)
      CHECK(pre.weights[l](i) - net.weights[l](i) == Approx(1e-3).epsilon(1e-4));

  // Quadratic bowl around a fixed target: loss = 0.5 |theta - theta*|^2.
  Mlp bowl = Mlp::create({2, 3, 1}, 0.3, rng);
  const Mlp star = Mlp::create({2, 3, 1}, 0.3, rng);
  Adam opt = Adam::create(bowl, 1e-2);
  auto loss = [&] {
    double s = 0;
    for (std::size_t l = 0; l < bowl.weights.size(); ++l)
      s += 0.5 * ((bowl.weights[l] - star.weights[l]).squaredNorm() +
                  (bowl.biases[l] - star.biases[l]).squaredNorm());
    return s;
  };
  double prev = loss();
  const double start = prev;
  for (int t = 0; t < 200; ++t) {
    MlpGrads g = zero;
    for (std::size_t l = 0; l < bowl.weights.size(); ++l) {
      g.weights[l] = bowl.weights[l] - star.weights[l];
      g.biases[l] = bowl.biases[l] - star.biases[l];
    }
    opt.step(bowl, g);
    const double cur = loss();
    if (t >= 10) CHECK(cur <= prev);
    prev = cur;
  }
  CHECK(prev < 0.5 * start);
}

TEST_CASE("replay memory and normalizer") {
  ReplayMemory m(3);
  for (int i = 0; i < 5; ++i) m.push({VectorXd::Constant(1, i), bits({1})});
  CHECK(m.size() == 3);
  CHECK(m.at(0).feature(0) == 2);
  Rng rng(47);
  auto idx = m.sample_indices(3, rng);
  std::sort(idx.begin(), idx.end());
  CHECK(idx == std::vector<int>{0, 1, 2});
  CHECK(m.sample_indices(10, rng).size() == 10);

  RunningNormalizer nrm(2);
  for (int i = 0; i < 100; ++i) nrm.update(vec({double(i), 5.0}));
  const VectorXd z = nrm.apply(vec({49.5, 5.0}));
  CHECK(std::abs(z(0)) < 1e-12);
  CHECK(z(1) == 0.0);
}

TEST_CASE("training step") {
  ScenarioSpec spec = preset_spec("desk");
  spec.drol.hidden = {16};
  const Scenario sc = build_scenario(spec);
  DrolState s = make_drol_state(sc, 48);
  const VectorXd f = VectorXd::Random(s.mlp.input_dim());
  s.memory.push({f, bits({1, 0, 1, 0, 1})});  // normalizer left empty, so inputs pass unchanged
  CHECK(std::isnan(train_step(s, 1, 2)));
  double loss = 1;
  for (int t = 0; t < 500 && loss >= 0.01; ++t) loss = train_step(s, 1, 1);
  CHECK(loss < 0.01);

  DrolState a = make_drol_state(sc, 49), b = make_drol_state(sc, 49);
  for (int i = 0; i < 30; ++i) {
    const VectorXd x = VectorXd::Random(a.mlp.input_dim());
    a.memory.push({x, bits({1, 1, 0, 0, 1})});
    b.memory.push({x, bits({1, 1, 0, 0, 1})});
    a.norm.update(x);
    b.norm.update(x);
  }
  for (int t = 0; t < 20; ++t) CHECK(train_step(a, 8, 10) == train_step(b, 8, 10));
}

TEST_CASE("learner frame records are well formed and deterministic") {
  const Scenario sc = make_scenario("desk");
  auto run = [&](int frames) {
    World w = make_world(sc, 50);
    DrolState s = make_drol_state(sc, 50);
    std::vector<FrameRecord> out;
    for (int n = 0; n < frames; ++n) {
      FrameContext ctx = prepare_frame(sc, w);
      out.push_back(run_drol_frame(sc, w, s, ctx, {}));
    }
    return out;
  };
  const auto a = run(60), b = run(60);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].frame == int(i) + 1);
    CHECK(std::isfinite(a[i].U_genie));
    CHECK(std::isfinite(a[i].U_practical));
    CHECK(a[i].a_c.size() == 3);
    CHECK(a[i].a_r.size() == 2);
    for (auto x : a[i].a_c) CHECK(x <= 1);
    for (auto x : a[i].a_r) CHECK(x <= 1);
    CHECK(a[i].U_genie == b[i].U_genie);
    CHECK(a[i].a_c == b[i].a_c);
    CHECK((std::isnan(a[i].loss) ? std::isnan(b[i].loss) : a[i].loss == b[i].loss));
  }
}

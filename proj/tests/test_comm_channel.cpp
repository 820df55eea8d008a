// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "isac/comm_channel.hpp"
#include "isac/rng.hpp"

using namespace isac;
using doctest::Approx;

TEST_CASE("true channel evolution") {
  Rng rng(1);
  const CVec g = draw_complex_normal(rng, 4, 1.0);
  CHECK(evolve_true_channel(g, 1.0, 1.0, rng) == g);

  // rho = 0: the channel is a fresh CN(0, beta_bar) draw.
  const double beta_bar = 2.5;
  double acc = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += std::norm(evolve_true_channel(g, 0.0, beta_bar, rng)(0));
  CHECK(acc / n == Approx(beta_bar).epsilon(0.03));

  // rho = 0.9, beta_bar = 1: E|g'|^2 = 0.81 |g|^2 + 0.19 per entry.
  CVec g1(1);
  g1(0) = {1.2, -0.5};
  acc = 0;
  for (int i = 0; i < n; ++i) acc += std::norm(evolve_true_channel(g1, 0.9, 1.0, rng)(0));
  CHECK(acc / n == Approx(0.81 * std::norm(g1(0)) + 0.19).epsilon(0.03));
}

TEST_CASE("csi update branches") {
  CommUserParams p;
  p.beta_bar = 1.0;
  p.P_u = 1.0;
  p.delta_ul = 1.0;
  p.rho = 0.7;
  CHECK(mmse_kappa(p, 10) == Approx(10.0 / 11.0).epsilon(1e-14));
  const CVec g = CVec::Constant(3, cd(0.3, 0.4));
  const CsiBranch e = estimate_csi(g, p, 10, CVec::Zero(3));
  CHECK(e.varsigma == Approx(1.0 / 11.0).epsilon(1e-14));

  // Noiseless uplink: exact estimate.
  p.delta_ul = 1e-300;
  const CsiBranch exact = estimate_csi(g, p, 10, CVec::Ones(3));
  CHECK(mmse_kappa(p, 10) == 1.0);
  CHECK(exact.varsigma == 0.0);
  CHECK((exact.g_hat - g).norm() < 1e-12);

  // Full decorrelation: the prior is forgotten.
  p.rho = 0.0;
  for (double s0 : {0.0, 0.3, 7.0}) CHECK(predict_csi({g, s0}, p).varsigma == p.beta_bar);
}

TEST_CASE("prediction contracts toward beta_bar at rate rho^2") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    CommUserParams p;
    p.rho = rng.uniform();
    p.beta_bar = std::pow(10.0, -10 + 10 * rng.uniform());
    const double s0 = 2 * p.beta_bar * rng.uniform();
    CsiBranch b{CVec::Zero(1), s0};
    double geo = 1, slack = 0;
    for (int n = 1; n <= 200; ++n) {
      b = predict_csi(b, p);
      geo *= p.rho * p.rho;
      slack = p.rho * p.rho * slack + 4 * 2.220446049250313e-16 * p.beta_bar;
      CHECK(std::abs(b.varsigma - p.beta_bar) <= geo * std::abs(s0 - p.beta_bar) + slack);
    }
  }
}

TEST_CASE("effective rate") {
  CVec g = CVec::Zero(2);
  g(0) = 1.0;
  CMat W = CMat::Zero(2, 1);
  W(0, 0) = 1.0;  // sqrt(P) e1 with P = 1
  CHECK(effective_rate(g, 0.0, W, 0, 10, 0, 1.0, 1.0) == Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(effective_rate(g, 0.0, W, 0, 10, 10, 1.0, 1.0) == 0.0);
  CMat Wp = CMat::Zero(2, 1);
  Wp(1, 0) = 1.0;
  CHECK(effective_rate(g, 0.0, Wp, 0, 10, 0, 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(effective_rate(g, 0.0, W, 0, 10, 11, 1.0, 1.0), ContractViolation);
  // Pilot overhead scales the rate linearly.
  CHECK(effective_rate(g, 0.0, W, 0, 10, 4, 1.0, 1.0) == Approx(0.6 * std::log(2.0)));
}

TEST_CASE("initial channel draws respect the configured variances") {
  CommUserParams p;
  p.beta_bar = 4.0;
  p.varsigma_0 = 1.0;
  Rng a(5), b(6);
  double gt = 0, err = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const CommChannelState s = initial_channel(p, 1, a, b);
    gt += std::norm(s.g_true(0));
    err += std::norm(s.g_hat(0) - s.g_true(0));
    CHECK(s.varsigma == 1.0);
  }
  CHECK(gt / n == Approx(4.0).epsilon(0.05));
  CHECK(err / n == Approx(1.0).epsilon(0.05));
}

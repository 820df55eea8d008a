// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "isac/radar_tracking.hpp"
#include "isac/rng.hpp"

using namespace isac;
using doctest::Approx;
constexpr double kPi = std::numbers::pi;

namespace {

Mat3 random_spd(Rng& rng) {
  Mat3 A;
  for (int i = 0; i < 9; ++i) A(i) = rng.normal();
  return A * A.transpose() + 0.1 * Mat3::Identity();
}

SystemConfig paper_cfg() { return SystemConfig{}; }

}  // namespace

TEST_CASE("state transition") {
  const Vec3 still(0.3, 120, 0);
  CHECK(gamma_transition(still, 1.0, 1e-3) == still);

  const Vec3 radial(0.4, 100, 10);
  const Vec3 r = gamma_transition(radial, 0.4, 1e-3);
  CHECK(r(0) == 0.4);
  CHECK(r(1) == Approx(100 - 10 * 1e-3).epsilon(1e-15));

  const Vec3 side(0.2 + kPi / 2, 100, 10);
  const Vec3 s = gamma_transition(side, 0.2, 1e-3);
  CHECK(s(0) == Approx(side(0) + 1e-4).epsilon(1e-15));
  CHECK(s(1) == Approx(100).epsilon(1e-15));
  CHECK(s(2) == 10);

  CHECK_THROWS_AS(gamma_transition(Vec3(0, -1, 0), 0, 1e-3), DegenerateGeometry);
  CHECK_THROWS_AS(gamma_transition(Vec3(0, 0.001, 10), 0, 1.0), DegenerateGeometry);
}

TEST_CASE("transition jacobian") {
  const double mt = 2e-3, tb = 0.1;
  const Vec3 x(0.9, 80, 0);
  const Mat3 J = gamma_jacobian(x, tb, mt);
  Mat3 expect = Mat3::Identity();
  expect(0, 2) = mt * std::sin(0.9 - tb) / 80;
  expect(1, 2) = -mt * std::cos(0.9 - tb);
  CHECK((J - expect).norm() < 1e-15);

  const Vec3 y(tb, 50, 20);
  CHECK(gamma_jacobian(y, tb, mt)(0, 0) == Approx(1 + 20 * mt / 50).epsilon(1e-15));

  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const Vec3 z(-1 + 2 * rng.uniform(), 50 + 450 * rng.uniform(), -40 + 80 * rng.uniform());
    const Mat3 Jz = gamma_jacobian(z, 0.3, 5e-3);
    Mat3 fd;
    for (int c = 0; c < 3; ++c) {
      const double h = 1e-6 * std::max(1.0, std::abs(z(c)));
      Vec3 p = z, m = z;
      p(c) += h;
      m(c) -= h;
      fd.col(c) = (gamma_transition(p, 0.3, 5e-3) - gamma_transition(m, 0.3, 5e-3)) / (2 * h);
    }
    CHECK((Jz - fd).norm() / Jz.norm() < 1e-5);
  }
}

TEST_CASE("true state evolution noise") {
  RadarTargetParams p;
  p.theta_bar = 0.5;
  const Vec3 x(0.2, 150, 30);
  CHECK(evolve_true_state(x, p, 1e-3, Vec3(1, -2, 3)) == gamma_transition(x, 0.5, 1e-3));

  p.sigma_eps = Vec3(1e-4, 0.3, 2.0);
  Rng rng(12);
  const int n = 100000;
  const Vec3 mean = gamma_transition(x, p.theta_bar, 1e-3);
  Mat3 cov = Mat3::Zero();
  double v_sum = 0;
  for (int i = 0; i < n; ++i) {
    const Vec3 e = evolve_true_state(x, p, 1e-3, rng) - mean;
    cov += e * e.transpose();
    v_sum += e(2);
  }
  cov /= n;
  for (int i = 0; i < 3; ++i) CHECK(cov(i, i) == Approx(p.sigma_eps(i)).epsilon(0.03));
  CHECK(std::abs(v_sum / n) < 4 * std::sqrt(p.sigma_eps(2) / n));
  CHECK(std::abs(cov(0, 1)) < 3 * std::sqrt(p.sigma_eps(0) * p.sigma_eps(1) / n) * 1.5);
}

TEST_CASE("crb coefficient scaling laws") {
  const SystemConfig cfg = paper_cfg();
  const Vec3 x(0.3, 100, 20);
  const CrbCoefficients a = crb_coefficients(x, cfg, 1.0, 0.3 + kPi, cfg.M);
  const CrbCoefficients b = crb_coefficients(Vec3(0.3, 200, 20), cfg, 1.0, 0.3 + kPi, cfg.M);
  CHECK(b.A_theta / a.A_theta == Approx(16).epsilon(1e-12));
  CHECK(b.A_d / a.A_d == Approx(16).epsilon(1e-12));
  CHECK(b.A_v / a.A_v == Approx(16).epsilon(1e-12));

  SystemConfig c2 = cfg;
  c2.L_R = 2 * cfg.L_R;
  const CrbCoefficients e = crb_coefficients(x, c2, 1.0, 0.3 + kPi, cfg.M);
  const double L = cfg.L_R, L2 = c2.L_R;
  CHECK(a.A_theta / e.A_theta == Approx((L2 * L2 - 1) * L2 / ((L * L - 1) * L)).epsilon(1e-12));
  CHECK(a.A_d / e.A_d == Approx(2).epsilon(1e-12));

  // Approaching broadside in the angle makes the angle bound blow up.
  double prev = 0;
  for (double th : {1.0, 1.4, 1.55, 1.57}) {
    const double at = crb_coefficients(Vec3(th, 100, 20), cfg, 1.0, th + kPi, cfg.M).A_theta;
    CHECK(at > prev);
    prev = at;
  }
  CHECK_THROWS_AS(crb_coefficients(Vec3(kPi / 2, 100, 20), cfg, 1.0, kPi / 2 + kPi, cfg.M),
                  SingularGeometry);
  CHECK_THROWS_AS(crb_coefficients(x, cfg, 1.0, 0.3, 1), ContractViolation);
}

TEST_CASE("sensing gain") {
  CHECK(sensing_gain(CMat::Zero(4, 2), 0.3) == 0.0);
  const double P = 2.0;
  CMat W(6, 1);
  W.col(0) = std::sqrt(P) * steering_vector(0.7, 6);
  CHECK(sensing_gain(W, 0.7) == Approx(P).epsilon(1e-14));

  Rng rng(13);
  CMat R(5, 3);
  for (int i = 0; i < R.size(); ++i) R(i) = rng.complex_normal(1.0);
  double direct = 0;
  for (int k = 0; k < 3; ++k) {
    cd acc = 0;
    for (int l = 0; l < 5; ++l)
      acc += std::conj(std::polar(1.0 / std::sqrt(5.0), kPi * l * std::sin(-0.4))) * R(l, k);
    direct += std::norm(acc);
  }
  CHECK(std::abs(sensing_gain(R, -0.4) - direct) < 1e-12);
}

TEST_CASE("measurement synthesis") {
  const CrbCoefficients crb{2e-3, 0.5, 3.0};
  const Vec3 x(0.1, 90, -5);
  CHECK((synthesize_measurement(x, crb, 1e18, Vec3(1, 1, 1)) - x).norm() < 1e-6);
  CHECK_THROWS_AS(synthesize_measurement(x, crb, 0.0, Vec3(1, 1, 1)), NoIllumination);

  Rng rng(14);
  const double gamma = 4.0;
  const int n = 100000;
  Mat3 cov = Mat3::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec3 e = synthesize_measurement(x, crb, gamma, rng) - x;
    cov += e * e.transpose();
  }
  cov /= n;
  const Vec3 var = crb.diag() / gamma;
  for (int i = 0; i < 3; ++i) CHECK(cov(i, i) == Approx(var(i)).epsilon(0.03));
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      CHECK(std::abs(cov(i, j)) < 3 * std::sqrt(var(i) * var(j) / n) * 1.5);
}

TEST_CASE("ekf recursion") {
  RadarTargetParams p;
  p.theta_bar = 0.2 + kPi;
  p.sigma_eps = Vec3(1e-6, 1e-3, 1e-2);
  const double mt = 1e-2;
  const CrbCoefficients crb{1e-4, 0.2, 0.5};
  TrackState t0{Vec3(0.2, 120, 15), Mat3(Vec3(1e-4, 0.3, 0.5).asDiagonal())};

  // Two prediction steps match the hand-composed recursion.
  const Mat3 J0 = gamma_jacobian(t0.x_hat, p.theta_bar, mt);
  const Vec3 x1 = gamma_transition(t0.x_hat, p.theta_bar, mt);
  const Mat3 J1 = gamma_jacobian(x1, p.theta_bar, mt);
  const Mat3 Se = p.sigma_eps.asDiagonal();
  const Mat3 expect = Se + J1 * (Se + J0 * t0.M * J0.transpose()) * J1.transpose();
  const TrackState t1 = ekf_step(t0, false, std::nullopt, crb, 1.0, p, mt);
  const TrackState t2 = ekf_step(t1, false, std::nullopt, crb, 1.0, p, mt);
  CHECK((t2.M - expect).norm() < 1e-12 * expect.norm());

  // A nearly perfect measurement dominates.
  const EkfPrediction pred = ekf_predict(t0, p, mt);
  const Vec3 xb(0.21, 119, 14);
  const TrackState sharp = ekf_update(pred, xb, crb, 1e14);
  CHECK(sharp.M.norm() < 1e-10);
  CHECK((sharp.x_hat - xb).norm() < 1e-6);

  // The update never loosens the bound.
  Rng rng(15);
  for (int t = 0; t < 200; ++t) {
    const EkfPrediction pr{Vec3(0.1, 100, 0), random_spd(rng)};
    const double gamma = std::pow(10.0, -2 + 4 * rng.uniform());
    const TrackState up = ekf_update(pr, Vec3(0.1, 100, 0), crb, gamma);
    Eigen::SelfAdjointEigenSolver<Mat3> es(pr.M_tilde - up.M);
    CHECK(es.eigenvalues().minCoeff() > -1e-12 * pr.M_tilde.norm());
  }
  CHECK_THROWS_AS(ekf_update(pred, xb, crb, 0.0), NoIllumination);
}

TEST_CASE("eigen error terms") {
  const CrbCoefficients crb{0.3, 2.0, 0.7};
  const std::array<double, 3> ones{1, 1, 1};
  const ErrorTerms id = eigen_error_terms(crb.sigma_delta(), crb, ones);
  for (int l = 0; l < 3; ++l) CHECK(id.lambda(l) == Approx(1.0).epsilon(1e-12));
  CHECK(id.psi.sum() == Approx(crb.diag().sum()).epsilon(1e-12));
  CHECK(id.psi_tilde == Approx(crb.diag().sum()).epsilon(1e-12));

  Rng rng(16);
  const std::array<double, 3> w{0.5, 2.0, 1.5};
  for (int t = 0; t < 300; ++t) {
    const Mat3 Mt = random_spd(rng);
    const double gamma = std::pow(10.0, -1 + 2 * rng.uniform());
    const ErrorTerms e = eigen_error_terms(Mt, crb, w);
    const Mat3 Mb = (Mt.inverse() + gamma * crb.sigma_delta().inverse()).inverse();
    double lhs = 0, rhs = 0;
    for (int l = 0; l < 3; ++l) {
      lhs += e.psi(l) / (gamma + e.lambda(l));
      rhs += w[l] * Mb(l, l);
    }
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, rhs));
    CHECK((posterior_from_terms(e, gamma) - Mb).norm() < 1e-10);
    CHECK(eigen_error_terms(Mt, crb, ones).psi_tilde == Approx(Mt.trace()).epsilon(1e-12));
  }
}

TEST_CASE("radar performance metric") {
  SystemConfig cfg;
  const ErrorTerms t{Vec3(1, 2, 3), Vec3(0.5, 0.25, 1.0), 4.0, Mat3::Identity()};
  const double ref = sic_reference(cfg);
  CHECK(radar_performance(true, t, ref, cfg) ==
        Approx(cfg.omega_bar * (0.5 / (ref + 1) + 0.25 / (ref + 2) + 1.0 / (ref + 3)) +
               (1 - cfg.omega_bar) * cfg.xi_a)
            .epsilon(1e-12));
  CHECK(radar_performance(false, t, 1.0, cfg) == radar_performance(false, t, 1e6, cfg));

  cfg.omega_bar = 1.0;
  for (double g : {0.1, 1.0, 10.0})
    CHECK(radar_performance(true, t, 2 * g, cfg) < radar_performance(true, t, g, cfg));
}

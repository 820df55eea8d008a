// SPDX-License-Identifier: Apache-2.0
#include "isac/radar_tracking.hpp"

#include <cmath>
#include <numbers>

namespace isac {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGrazing = 1e-6;
constexpr double kMaxCondition = 1e12;

void check_distance(const Vec3& x) {
  if (!(x(kDist) > 0)) throw DegenerateGeometry("target distance must stay positive");
}

Mat3 symmetrize(const Mat3& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

Vec3 gamma_transition(const Vec3& x, double theta_bar, double frame_time) {
  check_distance(x);
  const double rel = x(kTheta) - theta_bar;
  const double step = x(kVel) * frame_time;
  Vec3 out;
  out(kTheta) = x(kTheta) + step * std::sin(rel) / x(kDist);
  out(kDist) = x(kDist) - step * std::cos(rel);
  out(kVel) = x(kVel);
  check_distance(out);
  return out;
}

Mat3 gamma_jacobian(const Vec3& x, double theta_bar, double frame_time) {
  check_distance(x);
  const double rel = x(kTheta) - theta_bar;
  const double s = std::sin(rel), c = std::cos(rel);
  const double d = x(kDist), v = x(kVel), mt = frame_time;
  Mat3 J;
  J << 1.0 + v * mt * c / d, -v * mt * s / (d * d), mt * s / d,
       v * mt * s,           1.0,                   -mt * c,
       0.0,                  0.0,                   1.0;
  return J;
}

Vec3 evolve_true_state(const Vec3& x, const RadarTargetParams& p, double frame_time,
                       const Vec3& u) {
  Vec3 next = gamma_transition(x, p.theta_bar, frame_time);
  next += (p.sigma_eps.array().sqrt() * u.array()).matrix();
  check_distance(next);
  return next;
}

Vec3 evolve_true_state(const Vec3& x, const RadarTargetParams& p, double frame_time, Rng& rng) {
  Vec3 u(rng.normal(), rng.normal(), rng.normal());
  return evolve_true_state(x, p, frame_time, u);
}

CrbCoefficients crb_coefficients(const Vec3& x_pred, const SystemConfig& cfg, double sigma_rcs,
                                 double theta_bar, int M2) {
  check_distance(x_pred);
  if (M2 < 2) throw ContractViolation("M2 must be at least 2");
  if (cfg.B < 2 || cfg.L_R < 2) throw ContractViolation("B and L_R must be at least 2");
  const double cos_t = std::cos(x_pred(kTheta));
  const double cos_rel = std::cos(x_pred(kTheta) - theta_bar);
  if (std::abs(cos_t) < kGrazing || std::abs(cos_rel) < kGrazing)
    throw SingularGeometry("grazing geometry: angle bound is unbounded");

  const double d = x_pred(kDist);
  const double alpha_sq = cfg.c0 * cfg.c0 * sigma_rcs /
                          (std::pow(4.0 * kPi, 3) * cfg.fc * cfg.fc * std::pow(d, 4));
  const double xi = alpha_sq * kPi * kPi * cfg.B * double(M2) * cfg.L_R * cfg.L_T;
  const double sigma = cfg.sigma_radar();
  const double c2 = cfg.c0 * cfg.c0;
  const double tf = cfg.T * cfg.fc * cos_rel;

  CrbCoefficients out;
  out.A_theta = 6.0 * sigma / (xi * cos_t * cos_t * (double(cfg.L_R) * cfg.L_R - 1.0));
  out.A_d = 3.0 * c2 * sigma /
            (8.0 * xi * cfg.delta_f * cfg.delta_f * (double(cfg.B) * cfg.B - 1.0));
  out.A_v = 3.0 * c2 * sigma / (8.0 * xi * tf * tf * (double(M2) * M2 - 1.0));
  return out;
}

CVec steering_vector(double theta, int L) {
  CVec v(L);
  const double phase = kPi * std::sin(theta);
  const double scale = 1.0 / std::sqrt(double(L));
  for (int l = 0; l < L; ++l) v(l) = std::polar(scale, phase * l);
  return v;
}

double sensing_gain(const CMat& W, double theta) {
  if (W.size() == 0) return 0.0;
  const CVec v = steering_vector(theta, static_cast<int>(W.rows()));
  return (v.adjoint() * W).squaredNorm();
}

Vec3 synthesize_measurement(const Vec3& x_true, const CrbCoefficients& crb, double gamma,
                            const Vec3& u) {
  if (!(gamma > 0)) throw NoIllumination("measurement requested for an unilluminated target");
  return x_true + ((crb.diag() / gamma).array().sqrt() * u.array()).matrix();
}

Vec3 synthesize_measurement(const Vec3& x_true, const CrbCoefficients& crb, double gamma,
                            Rng& rng) {
  Vec3 u(rng.normal(), rng.normal(), rng.normal());
  return synthesize_measurement(x_true, crb, gamma, u);
}

double scaled_condition(const Mat3& M) {
  const Vec3 d = M.diagonal();
  if ((d.array() <= 0).any()) return std::numeric_limits<double>::infinity();
  const Vec3 s = d.array().rsqrt();
  const Mat3 R = s.asDiagonal() * M * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat3> es(symmetrize(R), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

EkfPrediction ekf_predict(const TrackState& track, const RadarTargetParams& p,
                          double frame_time) {
  EkfPrediction out;
  out.x_tilde = gamma_transition(track.x_hat, p.theta_bar, frame_time);
  const Mat3 J = gamma_jacobian(track.x_hat, p.theta_bar, frame_time);
  out.M_tilde = symmetrize(Mat3(p.sigma_eps.asDiagonal()) + J * track.M * J.transpose());
  if (scaled_condition(out.M_tilde) > kMaxCondition)
    throw IllConditioned("predicted bound matrix is ill-conditioned");
  return out;
}

TrackState ekf_update(const EkfPrediction& pred, const Vec3& x_bar, const CrbCoefficients& crb,
                      double gamma) {
  if (!(gamma > 0)) throw NoIllumination("update requested for an unilluminated target");
  if (scaled_condition(pred.M_tilde) > kMaxCondition)
    throw IllConditioned("predicted bound matrix is ill-conditioned");
  // Work in coordinates where the measurement noise is white: Y = S^-1 Mt S^-1.
  const Vec3 s = (crb.diag() / gamma).array().sqrt();
  const Vec3 s_inv = s.cwiseInverse();
  const Mat3 Y = symmetrize(s_inv.asDiagonal() * pred.M_tilde * s_inv.asDiagonal());
  Eigen::SelfAdjointEigenSolver<Mat3> es(Y);
  const Vec3 y = es.eigenvalues().cwiseMax(0.0);
  const Vec3 shrink = (y.array() / (1.0 + y.array())).matrix();
  const Mat3 core = es.eigenvectors() * shrink.asDiagonal() * es.eigenvectors().transpose();

  TrackState out;
  const Mat3 gain = s.asDiagonal() * core * s_inv.asDiagonal();
  out.x_hat = pred.x_tilde + gain * (x_bar - pred.x_tilde);
  out.M = symmetrize(s.asDiagonal() * core * s.asDiagonal());
  check_distance(out.x_hat);
  return out;
}

TrackState ekf_step(const TrackState& track, bool reestimate, const std::optional<Vec3>& x_bar,
                    const CrbCoefficients& crb, double gamma, const RadarTargetParams& p,
                    double frame_time) {
  const EkfPrediction pred = ekf_predict(track, p, frame_time);
  if (!reestimate) return {pred.x_tilde, pred.M_tilde};
  if (!x_bar) throw ContractViolation("re-estimation requires a measurement");
  return ekf_update(pred, *x_bar, crb, gamma);
}

ErrorTerms eigen_error_terms(const Mat3& M_tilde, const CrbCoefficients& crb,
                             const std::array<double, 3>& omega) {
  if (scaled_condition(M_tilde) > kMaxCondition)
    throw IllConditioned("predicted bound matrix is ill-conditioned");
  const Vec3 sd = crb.diag().array().sqrt();
  if (!((sd.array() > 0).all())) throw ContractViolation("measurement variances must be positive");
  const Vec3 sd_inv = sd.cwiseInverse();
  // B = Sd Mt^-1 Sd is the inverse of Y = Sd^-1 Mt Sd^-1; share eigenvectors.
  const Mat3 Y = symmetrize(sd_inv.asDiagonal() * M_tilde * sd_inv.asDiagonal());
  Eigen::SelfAdjointEigenSolver<Mat3> es(Y);
  const Vec3 y = es.eigenvalues();
  if (!(y.minCoeff() > 0)) throw IllConditioned("predicted bound matrix is not positive definite");

  ErrorTerms t;
  t.lambda = y.cwiseInverse();
  t.C = sd.asDiagonal() * es.eigenvectors();
  const Vec3 w(omega[0], omega[1], omega[2]);
  for (int l = 0; l < 3; ++l) t.psi(l) = w.dot(t.C.col(l).cwiseAbs2());
  t.psi_tilde = w.dot(M_tilde.diagonal());
  return t;
}

Mat3 posterior_from_terms(const ErrorTerms& t, double gamma) {
  const Vec3 inv = (t.lambda.array() + gamma).inverse();
  return t.C * inv.asDiagonal() * t.C.transpose();
}

double radar_performance(bool reestimate, const ErrorTerms& t, double gamma,
                         const SystemConfig& cfg) {
  if (!reestimate) return cfg.omega_bar * t.psi_tilde;
  if (!(gamma > 0)) throw NoIllumination("re-estimated target receives no power");
  double err = 0;
  for (int l = 0; l < 3; ++l) err += t.psi(l) / (gamma + t.lambda(l));
  const double cost = cfg.xi_a - cfg.xi_b * std::log10(gamma / sic_reference(cfg));
  return cfg.omega_bar * err + (1.0 - cfg.omega_bar) * cost;
}

}  // namespace isac

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "isac/config.hpp"
#include "isac/rng.hpp"
#include "isac/types.hpp"

namespace isac {

enum StateIndex { kTheta = 0, kDist = 1, kVel = 2 };

/// Tracker belief: state estimate and its bound matrix.
struct TrackState {
  Vec3 x_hat = Vec3::Zero();
  Mat3 M = Mat3::Zero();
};

/// Per-unit-gain measurement variances for angle, distance and velocity.
struct CrbCoefficients {
  double A_theta = 0;
  double A_d = 0;
  double A_v = 0;

  Vec3 diag() const { return {A_theta, A_d, A_v}; }
  Mat3 sigma_delta() const { return diag().asDiagonal(); }
};

/// Eigen-decomposed error quantities for one predicted bound matrix.
struct ErrorTerms {
  Vec3 lambda = Vec3::Zero();
  Vec3 psi = Vec3::Zero();
  double psi_tilde = 0;
  Mat3 C = Mat3::Zero();
};

struct EkfPrediction {
  Vec3 x_tilde = Vec3::Zero();
  Mat3 M_tilde = Mat3::Zero();
};

/// Constant-velocity kinematics over one frame of duration `frame_time`.
Vec3 gamma_transition(const Vec3& x, double theta_bar, double frame_time);
Mat3 gamma_jacobian(const Vec3& x, double theta_bar, double frame_time);

/// Kinematic step plus Gaussian innovation drawn from `rng`.
Vec3 evolve_true_state(const Vec3& x, const RadarTargetParams& p, double frame_time, Rng& rng);
/// Same step with pre-drawn standard normals `u`.
Vec3 evolve_true_state(const Vec3& x, const RadarTargetParams& p, double frame_time, const Vec3& u);

CrbCoefficients crb_coefficients(const Vec3& x_pred, const SystemConfig& cfg, double sigma_rcs,
                                 double theta_bar, int M2);

/// Half-wavelength ULA steering vector with unit norm.
CVec steering_vector(double theta, int L);
/// Sum over beams of |v(theta)^H w_k|^2.
double sensing_gain(const CMat& W, double theta);

Vec3 synthesize_measurement(const Vec3& x_true, const CrbCoefficients& crb, double gamma, Rng& rng);
Vec3 synthesize_measurement(const Vec3& x_true, const CrbCoefficients& crb, double gamma,
                            const Vec3& u);

/// Condition number of M after scaling to unit diagonal.
double scaled_condition(const Mat3& M);

EkfPrediction ekf_predict(const TrackState& track, const RadarTargetParams& p, double frame_time);
TrackState ekf_update(const EkfPrediction& pred, const Vec3& x_bar, const CrbCoefficients& crb,
                      double gamma);
TrackState ekf_step(const TrackState& track, bool reestimate, const std::optional<Vec3>& x_bar,
                    const CrbCoefficients& crb, double gamma, const RadarTargetParams& p,
                    double frame_time);

ErrorTerms eigen_error_terms(const Mat3& M_tilde, const CrbCoefficients& crb,
                             const std::array<double, 3>& omega);

/// Posterior bound reconstructed from error terms at gain `gamma`.
Mat3 posterior_from_terms(const ErrorTerms& t, double gamma);

/// Weighted tracking error plus interference-cancellation cost.
double radar_performance(bool reestimate, const ErrorTerms& t, double gamma,
                         const SystemConfig& cfg);

/// Threshold used in the cancellation cost, xi_c * P + sigma.
inline double sic_reference(const SystemConfig& cfg) { return cfg.xi_c * cfg.P + cfg.sigma_radar(); }

}  // namespace isac

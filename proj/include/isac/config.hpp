// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "isac/types.hpp"

namespace isac {

double db_to_linear(double x_db);

struct SystemConfig {
  double c0 = 3e8;
  double fc = 5.89e9;
  int B = 64;
  double delta_f = 156.25e3;
  double T_o = 6.4e-6;
  double T_cp = 1.6e-6;
  double T = 8e-6;
  int M = 800;
  int N = 10000;
  int L_T = 64;
  int L_R = 32;
  double P = 1.0;
  double noise_psd_bs = 3.98e-21;
  double noise_psd_user = 3.98e-21;
  int D = 10;
  std::vector<double> w_c;
  std::vector<double> w_r;
  double omega_bar = 0.3;
  std::array<double, 3> omega{1.0, 1.0, 1.0};
  double xi_a = 0.5;
  double xi_b = 0.24;
  double xi_c = 1.0;
  double delta_s = 0.005;

  /// Frame duration M*T.
  double frame_time() const { return M * T; }
  /// Per-user receiver noise over the full band.
  double sigma_user() const { return noise_psd_user * B * delta_f; }
  /// Radar noise power per subcarrier.
  double sigma_radar() const { return delta_f * noise_psd_bs; }
  /// Uplink pilot noise power at the base station.
  double delta_uplink() const { return noise_psd_bs * B * delta_f; }
  /// Largest number of users whose pilots fit in one frame.
  int max_estimated_users() const { return M / D; }

  void validate() const;
};

struct CommUserParams {
  double rho = 0.9;
  double beta_bar = 1.0;
  double P_u = 1.0;
  double sigma_k = 1.0;
  double delta_ul = 1.0;
  double varsigma_0 = 0.5;
  double distance = 0.0;  // informational

  void validate() const;
};

struct RadarTargetParams {
  double theta_bar = 0.0;
  Vec3 sigma_eps = Vec3::Zero();
  double sigma_rcs = 1.0;
  Vec3 x0 = Vec3(0.0, 100.0, 0.0);
  Mat3 M0 = Mat3::Identity();
  double rho_tilde = 0.0;  // informational

  void validate() const;
};

enum class RefineBasis { Dimension, CandidateCount };
enum class WUpdateMode { Lagrangian, ProxLinear };

struct DrolConfig {
  std::vector<int> hidden{128, 64};
  double leaky_slope = 0.3;
  double learning_rate = 1e-3;
  int batch_size = 100;
  int memory_capacity = 500;
  int refine_interval_c = 4;
  int refine_interval_r = 4;
  double A_c = 1.9;
  double A_r = 1.0;
  RefineBasis refine_basis = RefineBasis::Dimension;
  /// Initial base candidate counts; 0 means X+1.
  int K_tilde_c0 = 0;
  int K_tilde_r0 = 0;

  int warmup() const;
  void validate() const;
};

struct SolverOptions {
  int max_outer_iters = 100;
  double tol = 1e-5;
  WUpdateMode mode = WUpdateMode::Lagrangian;
  double mu_tol = 1e-14;
  double lambda_tol = 1e-12;
  double eta0 = 0.01;
  /// Keep the dual variables at their initial value (diagnostics only).
  bool freeze_eta = false;

  void validate() const;
};

struct ExperimentConfig {
  int frames = 0;  // 0 means SystemConfig::N
  int resync_interval = 0;
  bool practical = true;
  /// Evaluate the sensing gain at the true angle instead of the predicted one.
  bool gain_at_true_angle = false;
};

const char* to_string(RefineBasis b);
const char* to_string(WUpdateMode m);
RefineBasis refine_basis_from_string(const std::string& s);
WUpdateMode w_update_mode_from_string(const std::string& s);

}  // namespace isac

// SPDX-License-Identifier: Apache-2.0
#include "isac/config.hpp"

#include <cmath>

namespace isac {

double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

namespace {
void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}
}  // namespace

void SystemConfig::validate() const {
  require(c0 > 0 && fc > 0, "c0 and fc must be positive");
  require(B >= 2, "B must be at least 2");
  require(delta_f > 0 && T_o > 0 && T_cp > 0 && T > 0, "durations must be positive");
  require(std::abs(T - (T_o + T_cp)) <= 1e-9 * T, "T must equal T_o + T_cp");
  require(std::abs(delta_f * T_o - 1.0) <= 1e-9, "delta_f must equal 1/T_o");
  require(M >= 2 && N >= 1, "M and N must be positive");
  require(L_T >= 1 && L_R >= 2, "antenna counts must be positive (L_R >= 2)");
  require(P > 0 && noise_psd_bs > 0 && noise_psd_user > 0, "powers must be positive");
  require(D >= 1, "D must be positive");
  for (double w : w_c) require(w >= 0, "w_c must be nonnegative");
  for (double w : w_r) require(w >= 0, "w_r must be nonnegative");
  for (double w : omega) require(w >= 0, "omega must be nonnegative");
  require(omega_bar >= 0 && omega_bar <= 1, "omega_bar must lie in [0,1]");
  require(xi_c >= 0 && xi_b >= 0, "SIC constants must be nonnegative");
  require(delta_s > 0, "delta_s must be positive");
  require(static_cast<int>(w_c.size()) * D <= M, "K*D must not exceed M");
}

void CommUserParams::validate() const {
  require(rho >= 0 && rho <= 1, "rho must lie in [0,1]");
  require(beta_bar > 0, "beta_bar must be positive");
  require(P_u > 0 && sigma_k > 0 && delta_ul >= 0, "user powers must be positive");
  require(varsigma_0 >= 0, "varsigma_0 must be nonnegative");
}

void RadarTargetParams::validate() const {
  require((sigma_eps.array() >= 0).all(), "sigma_eps must be nonnegative");
  require(sigma_rcs > 0, "sigma_rcs must be positive");
  require(x0(1) > 0, "initial distance must be positive");
  require((M0 - M0.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1 + M0.cwiseAbs().maxCoeff()),
          "M0 must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> es(M0);
  require(es.eigenvalues().minCoeff() >= -1e-10 * (1 + M0.cwiseAbs().maxCoeff()),
          "M0 must be positive semidefinite");
}

int DrolConfig::warmup() const { return std::min(50, std::max(1, memory_capacity / 10)); }

void DrolConfig::validate() const {
  require(!hidden.empty(), "MLP needs at least one hidden layer");
  for (int h : hidden) require(h >= 1, "hidden sizes must be positive");
  require(learning_rate > 0 && batch_size >= 1 && memory_capacity >= 1, "training sizes");
  require(refine_interval_c >= 1 && refine_interval_r >= 1, "refine intervals must be >= 1");
  require(A_c >= 0 && A_r >= 0, "A constants must be nonnegative");
}

void SolverOptions::validate() const {
  require(max_outer_iters >= 1, "max_outer_iters must be >= 1");
  require(tol > 0 && mu_tol > 0 && lambda_tol > 0, "tolerances must be positive");
  require(eta0 >= 0, "eta0 must be nonnegative");
}

const char* to_string(RefineBasis b) {
  return b == RefineBasis::Dimension ? "dimension" : "candidate-count";
}
const char* to_string(WUpdateMode m) {
  return m == WUpdateMode::Lagrangian ? "lagrangian-inverse" : "prox-linear";
}
RefineBasis refine_basis_from_string(const std::string& s) {
  if (s == "dimension") return RefineBasis::Dimension;
  if (s == "candidate-count") return RefineBasis::CandidateCount;
  throw ConfigError("unknown refine basis: " + s);
}
WUpdateMode w_update_mode_from_string(const std::string& s) {
  if (s == "lagrangian-inverse" || s == "lagrangian") return WUpdateMode::Lagrangian;
  if (s == "prox-linear") return WUpdateMode::ProxLinear;
  throw ConfigError("unknown W update mode: " + s);
}

}  // namespace isac

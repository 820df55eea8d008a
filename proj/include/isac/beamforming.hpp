// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "isac/comm_channel.hpp"
#include "isac/config.hpp"
#include "isac/radar_tracking.hpp"

namespace isac {

/// Radar side of one target under a given decision.
struct TargetBranch {
  bool reestimate = false;
  double theta_tilde = 0;  // angle at which the sensing gain is evaluated
  ErrorTerms terms;         // lambda/psi valid when reestimate, psi_tilde always
};

/// A re-estimated target as seen by the beamformer.
struct RadarTerm {
  CVec v;
  Vec3 psi = Vec3::Zero();
  Vec3 lambda = Vec3::Zero();
  double w_r = 0;
};

/// Everything the beamforming problem needs for one decision pair.
struct P2Instance {
  int L_T = 0;
  int K = 0;
  double P = 0;
  std::vector<CVec> g_hat;
  std::vector<double> noise_eff;  // varsigma_k * P + sigma_k
  std::vector<double> w_eff;      // w_c * (M - M1) / M
  std::vector<RadarTerm> radar;
  double omega_bar = 0;
  double zeta_b = 0;
  double sic_ref = 1;
  double mu_max = 1;
  /// Radar penalty that does not depend on W.
  double psi_bar = 0;
};

P2Instance make_instance(const SystemConfig& cfg, const std::vector<CommUserParams>& users,
                         const std::vector<CsiBranch>& csi,
                         const std::vector<TargetBranch>& targets, int M1);

/// Weighted-sum utility computed from the per-entity rate and radar metrics.
double evaluate_utility(const SystemConfig& cfg, const std::vector<CommUserParams>& users,
                        const std::vector<CsiBranch>& csi,
                        const std::vector<TargetBranch>& targets, int M1, const CMat& W);

struct UtilityParts {
  double comm = 0;   // sum of weighted rates
  double radar = 0;  // sum of weighted radar metrics
  double total() const { return comm - radar; }
};

/// Utility of W on an instance; throws NoIllumination if a re-estimated target gets no power.
UtilityParts instance_utility(const P2Instance& inst, const CMat& W);

/// Weighted sum rate in its log-of-ratio form.
double fc_direct(const P2Instance& inst, const CMat& W);
/// Quadratic-transform surrogate of fc_direct.
double fc_tilde(const P2Instance& inst, const CMat& W, const Eigen::VectorXd& alpha,
                const CVec& beta);
/// W-dependent radar penalty with auxiliary gains mu.
double fr(const P2Instance& inst, const Eigen::VectorXd& mu);
/// Dual objective with the sensing constraint linearized at W_lin.
double lagrangian_objective(const P2Instance& inst, const CMat& W, const CMat& W_lin,
                            const Eigen::VectorXd& alpha, const CVec& beta,
                            const Eigen::VectorXd& mu, const Eigen::VectorXd& eta);
/// 2 dF/dW* at W: real part is the gradient along Re W, imaginary part along Im W.
CMat lagrangian_gradient(const P2Instance& inst, const CMat& W, const CMat& W_lin,
                         const Eigen::VectorXd& alpha, const CVec& beta,
                         const Eigen::VectorXd& eta);

Eigen::VectorXd sinr_vector(const P2Instance& inst, const CMat& W);
CVec update_beta(const P2Instance& inst, const CMat& W_old, const Eigen::VectorXd& alpha);
Eigen::VectorXd update_alpha(const P2Instance& inst, const CMat& W_old, const CVec& beta);

/// Positive root of sum_l a_l/(mu+lambda_l)^2 + b/mu = eta.
double solve_mu_root(const Vec3& a, const Vec3& lambda, double b, double eta, double mu_max,
                     double tol);
double mu_residual(const Vec3& a, const Vec3& lambda, double b, double eta, double mu);
Eigen::VectorXd update_mu(const P2Instance& inst, const Eigen::VectorXd& eta, double tol);

/// Sum over users of |beta_j|^2 g_j g_j^H.
CMat interference_matrix(const P2Instance& inst, const CVec& beta);
/// Linear terms h_k stacked as columns.
CMat linear_terms(const P2Instance& inst, const CMat& W_lin, const Eigen::VectorXd& alpha,
                  const CVec& beta, const Eigen::VectorXd& eta);

/// Exact maximizer of the concave quadratic in W over the power ball.
CMat update_w_lagrangian(const CMat& G, const CMat& H, double P, const CMat& W_old,
                         double tol, double* lambda_out = nullptr);

/// Momentum memory of the prox-linear update.
struct ProxMemory {
  bool first = true;
  CMat W_prev;  // iterate before W_old
  double d_prev = 1.0;
  double f_prev = 0.0;
};

CMat prox_step(const CMat& W_tilde, const CMat& F, double f_tilde, double P);
CMat update_w_proxlinear(const CMat& G, const CMat& H, double P, const CMat& W_old,
                         ProxMemory& mem, double tol);

double sca_lower_bound(const CMat& W, const CMat& W_old, const CVec& v, int k);
Eigen::VectorXd update_eta(const P2Instance& inst, const Eigen::VectorXd& eta, const CMat& W_new,
                           const CMat& W_lin, const Eigen::VectorXd& mu, int t_bar,
                           double delta_s);

CMat mrt_beamformer(const std::vector<CVec>& g_hat, double P);

struct FpVars {
  CMat W;
  Eigen::VectorXd alpha;
  CVec beta;
  Eigen::VectorXd mu;
  Eigen::VectorXd eta;
};

enum class Block { Alpha, Beta, Mu, W, Eta };
const char* to_string(Block b);

struct BlockEvent {
  Block block;
  int iter;
  const FpVars& vars;
  const CMat& W_lin;
};
using BlockObserver = std::function<void(const BlockEvent&)>;

struct SolverTraceRow {
  int iter;
  double utility;
  double power;
};

struct P2Result {
  CMat W;
  UtilityParts parts;
  double utility = 0;
  int iters = 0;
  bool converged = false;
};

P2Result solve_p2(const P2Instance& inst, const SolverOptions& opts, double delta_s,
                  const BlockObserver& observer = {},
                  std::vector<SolverTraceRow>* trace = nullptr);

/// Utility of the matched-filter beamformer on the instance.
P2Result solve_mrt(const P2Instance& inst);

/// Counters for the power-budget assertion made after every W update.
struct PowerAudit {
  long long checks = 0;
  long long violations = 0;
  double worst_excess = 0;
};
PowerAudit power_audit();
void reset_power_audit();

/// Optional CSV sink that receives every solver iteration as "solve,iter,utility,power".
void set_solver_trace_sink(std::ostream* out);

}  // namespace isac

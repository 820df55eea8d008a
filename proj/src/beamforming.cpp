// SPDX-License-Identifier: Apache-2.0
#include "isac/beamforming.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>

namespace isac {

using Eigen::VectorXd;

namespace {

const double kLn10 = std::numbers::ln10;

std::mutex g_audit_mutex;
PowerAudit g_audit;
std::ostream* g_trace = nullptr;
long long g_trace_solve = 0;

void audit_power(const CMat& W, double P) {
  const double excess = W.squaredNorm() - P;
  std::lock_guard<std::mutex> lock(g_audit_mutex);
  ++g_audit.checks;
  if (excess > 1e-9) {
    ++g_audit.violations;
    g_audit.worst_excess = std::max(g_audit.worst_excess, excess);
  }
}

// Row vector of v^H w_k for every beam.
Eigen::RowVectorXcd beam_projection(const CVec& v, const CMat& W) { return v.adjoint() * W; }

}  // namespace

PowerAudit power_audit() {
  std::lock_guard<std::mutex> lock(g_audit_mutex);
  return g_audit;
}

void set_solver_trace_sink(std::ostream* out) {
  g_trace = out;
  g_trace_solve = 0;
  if (g_trace) *g_trace << "solve,iter,utility,power\n";
}

void reset_power_audit() {
  std::lock_guard<std::mutex> lock(g_audit_mutex);
  g_audit = {};
}

P2Instance make_instance(const SystemConfig& cfg, const std::vector<CommUserParams>& users,
                         const std::vector<CsiBranch>& csi,
                         const std::vector<TargetBranch>& targets, int M1) {
  if (users.size() != csi.size()) throw ContractViolation("user count mismatch");
  if (M1 < 0 || M1 > cfg.M) throw ContractViolation("pilot overhead exceeds the frame");
  P2Instance inst;
  inst.L_T = cfg.L_T;
  inst.K = static_cast<int>(users.size());
  inst.P = cfg.P;
  inst.omega_bar = cfg.omega_bar;
  inst.zeta_b = cfg.xi_b;
  inst.sic_ref = sic_reference(cfg);
  inst.mu_max = 10.0 * inst.sic_ref;
  const double frac = double(cfg.M - M1) / cfg.M;
  for (int k = 0; k < inst.K; ++k) {
    inst.g_hat.push_back(csi[k].g_hat);
    inst.noise_eff.push_back(csi[k].varsigma * cfg.P + users[k].sigma_k);
    inst.w_eff.push_back(cfg.w_c.at(k) * frac);
  }
  for (std::size_t q = 0; q < targets.size(); ++q) {
    const TargetBranch& t = targets[q];
    const double w = cfg.w_r.at(q);
    if (t.reestimate) {
      inst.radar.push_back({steering_vector(t.theta_tilde, cfg.L_T), t.terms.psi, t.terms.lambda, w});
      inst.psi_bar += w * (1.0 - cfg.omega_bar) * (cfg.xi_a + cfg.xi_b * std::log10(inst.sic_ref));
    } else {
      inst.psi_bar += w * cfg.omega_bar * t.terms.psi_tilde;
    }
  }
  return inst;
}

double evaluate_utility(const SystemConfig& cfg, const std::vector<CommUserParams>& users,
                        const std::vector<CsiBranch>& csi,
                        const std::vector<TargetBranch>& targets, int M1, const CMat& W) {
  double u = 0;
  for (std::size_t k = 0; k < users.size(); ++k)
    u += cfg.w_c.at(k) * effective_rate(csi[k].g_hat, csi[k].varsigma, W, int(k), cfg.M, M1,
                                        users[k].sigma_k, cfg.P);
  for (std::size_t q = 0; q < targets.size(); ++q) {
    const double gamma = targets[q].reestimate ? sensing_gain(W, targets[q].theta_tilde) : 0.0;
    u -= cfg.w_r.at(q) * radar_performance(targets[q].reestimate, targets[q].terms, gamma, cfg);
  }
  return u;
}

VectorXd sinr_vector(const P2Instance& inst, const CMat& W) {
  VectorXd s(inst.K);
  for (int k = 0; k < inst.K; ++k) {
    const Eigen::RowVectorXcd p = inst.g_hat[k].adjoint() * W;
    const double sig = std::norm(p(k));
    s(k) = sig / (std::max(p.squaredNorm() - sig, 0.0) + inst.noise_eff[k]);
  }
  return s;
}

double fc_direct(const P2Instance& inst, const CMat& W) {
  const VectorXd s = sinr_vector(inst, W);
  double f = 0;
  for (int k = 0; k < inst.K; ++k) f += inst.w_eff[k] * std::log1p(s(k));
  return f;
}

UtilityParts instance_utility(const P2Instance& inst, const CMat& W) {
  UtilityParts u;
  u.comm = fc_direct(inst, W);
  u.radar = inst.psi_bar;
  for (const RadarTerm& r : inst.radar) {
    const double gamma = beam_projection(r.v, W).squaredNorm();
    if (!(gamma > 0)) throw NoIllumination("re-estimated target receives no power");
    double err = 0;
    for (int l = 0; l < 3; ++l) err += r.psi(l) / (gamma + r.lambda(l));
    u.radar += r.w_r * (inst.omega_bar * err -
                        (1.0 - inst.omega_bar) * inst.zeta_b * std::log10(gamma));
  }
  return u;
}

double fc_tilde(const P2Instance& inst, const CMat& W, const VectorXd& alpha, const CVec& beta) {
  double f = 0;
  for (int k = 0; k < inst.K; ++k) {
    const Eigen::RowVectorXcd p = inst.g_hat[k].adjoint() * W;
    const double b = p.squaredNorm() + inst.noise_eff[k];
    const double a = alpha(k);
    f += inst.w_eff[k] * (std::log1p(a) - a) - std::norm(beta(k)) * b +
         2.0 * std::sqrt(inst.w_eff[k] * (1.0 + a)) * std::real(std::conj(beta(k)) * p(k));
  }
  return f;
}

double fr(const P2Instance& inst, const VectorXd& mu) {
  double f = 0;
  for (std::size_t q = 0; q < inst.radar.size(); ++q) {
    const RadarTerm& r = inst.radar[q];
    double err = 0;
    for (int l = 0; l < 3; ++l) err += r.psi(l) / (mu(q) + r.lambda(l));
    f += r.w_r * (inst.omega_bar * err - (1.0 - inst.omega_bar) * inst.zeta_b * std::log10(mu(q)));
  }
  return f;
}

double sca_lower_bound(const CMat& W, const CMat& W_old, const CVec& v, int k) {
  const cd c_new = v.dot(W.col(k));
  const cd c_old = v.dot(W_old.col(k));
  return 2.0 * std::real(std::conj(c_old) * c_new) - std::norm(c_old);
}

namespace {
double sca_sum(const CVec& v, const CMat& W, const CMat& W_lin) {
  const Eigen::RowVectorXcd c_new = beam_projection(v, W);
  const Eigen::RowVectorXcd c_old = beam_projection(v, W_lin);
  return 2.0 * std::real(c_old.dot(c_new)) - c_old.squaredNorm();
}
}  // namespace

double lagrangian_objective(const P2Instance& inst, const CMat& W, const CMat& W_lin,
                            const VectorXd& alpha, const CVec& beta, const VectorXd& mu,
                            const VectorXd& eta) {
  double f = fc_tilde(inst, W, alpha, beta) - fr(inst, mu);
  for (std::size_t q = 0; q < inst.radar.size(); ++q)
    f += eta(q) * (sca_sum(inst.radar[q].v, W, W_lin) - mu(q));
  return f;
}

CMat interference_matrix(const P2Instance& inst, const CVec& beta) {
  CMat G = CMat::Zero(inst.L_T, inst.L_T);
  for (int j = 0; j < inst.K; ++j)
    G.noalias() += std::norm(beta(j)) * inst.g_hat[j] * inst.g_hat[j].adjoint();
  return G;
}

CMat linear_terms(const P2Instance& inst, const CMat& W_lin, const VectorXd& alpha,
                  const CVec& beta, const VectorXd& eta) {
  CMat H(inst.L_T, inst.K);
  for (int k = 0; k < inst.K; ++k)
    H.col(k) = std::sqrt(inst.w_eff[k] * (1.0 + alpha(k))) * beta(k) * inst.g_hat[k];
  for (std::size_t q = 0; q < inst.radar.size(); ++q) {
    if (eta(q) == 0.0) continue;
    const CVec& v = inst.radar[q].v;
    const Eigen::RowVectorXcd c = beam_projection(v, W_lin);
    for (int k = 0; k < inst.K; ++k) H.col(k) += eta(q) * c(k) * v;
  }
  return H;
}

CMat lagrangian_gradient(const P2Instance& inst, const CMat& W, const CMat& W_lin,
                         const VectorXd& alpha, const CVec& beta, const VectorXd& eta) {
  return 2.0 * (linear_terms(inst, W_lin, alpha, beta, eta) - interference_matrix(inst, beta) * W);
}

CVec update_beta(const P2Instance& inst, const CMat& W_old, const VectorXd& alpha) {
  CVec beta(inst.K);
  for (int k = 0; k < inst.K; ++k) {
    const Eigen::RowVectorXcd p = inst.g_hat[k].adjoint() * W_old;
    const double b = p.squaredNorm() + inst.noise_eff[k];
    beta(k) = std::sqrt(inst.w_eff[k] * (1.0 + alpha(k))) * p(k) / b;
  }
  return beta;
}

VectorXd update_alpha(const P2Instance& inst, const CMat& W_old, const CVec& beta) {
  VectorXd alpha(inst.K);
  for (int k = 0; k < inst.K; ++k) {
    if (inst.w_eff[k] <= 0) {
      alpha(k) = 0;
      continue;
    }
    const cd a = inst.g_hat[k].dot(W_old.col(k));
    const double lam = std::real(std::conj(beta(k)) * a) / std::sqrt(inst.w_eff[k]);
    alpha(k) = 0.5 * (lam * lam + lam * std::sqrt(lam * lam + 4.0));
  }
  return alpha;
}

double mu_residual(const Vec3& a, const Vec3& lambda, double b, double eta, double mu) {
  double g = b / mu - eta;
  for (int l = 0; l < 3; ++l) g += a(l) / ((mu + lambda(l)) * (mu + lambda(l)));
  return g;
}

double solve_mu_root(const Vec3& a, const Vec3& lambda, double b, double eta, double mu_max,
                     double tol) {
  if (eta < 1e-12) return mu_max;
  const double floor = 1e-12 * mu_max;
  if (mu_residual(a, lambda, b, eta, floor) <= 0) return floor;
  double lo = floor, hi = std::max(mu_max, floor * 2);
  int expand = 0;
  while (mu_residual(a, lambda, b, eta, hi) > 0) {
    lo = hi;
    hi *= 2.0;
    if (++expand > 2000 || !std::isfinite(hi)) throw SolverFailure("mu bracket expansion failed");
  }
  for (int it = 0; it < 400 && hi - lo > tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mu_residual(a, lambda, b, eta, mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  const double r_lo = std::abs(mu_residual(a, lambda, b, eta, lo));
  const double r_hi = std::abs(mu_residual(a, lambda, b, eta, hi));
  return r_lo < r_hi ? lo : hi;
}

VectorXd update_mu(const P2Instance& inst, const VectorXd& eta, double tol) {
  VectorXd mu(inst.radar.size());
  const double b_unit = (1.0 - inst.omega_bar) * inst.zeta_b / kLn10;
  for (std::size_t q = 0; q < inst.radar.size(); ++q) {
    const RadarTerm& r = inst.radar[q];
    mu(q) = solve_mu_root(r.w_r * inst.omega_bar * r.psi, r.lambda, r.w_r * b_unit, eta(q),
                          inst.mu_max, tol);
  }
  return mu;
}

CMat update_w_lagrangian(const CMat& G, const CMat& H, double P, const CMat& W_old, double tol,
                         double* lambda_out) {
  if (lambda_out) *lambda_out = 0;
  const double h_norm = H.squaredNorm();
  if (!(h_norm > 0)) return W_old;

  Eigen::SelfAdjointEigenSolver<CMat> es(G);
  const VectorXd s = es.eigenvalues().cwiseMax(0.0);
  const CMat Z = es.eigenvectors().adjoint() * H;
  const VectorXd n = Z.rowwise().squaredNorm();
  const double s_max = s.maxCoeff();
  const double s_eps = 1e-12 * std::max(s_max, std::numeric_limits<double>::min());

  auto power = [&](double lam) {
    double p = 0;
    for (int i = 0; i < s.size(); ++i) {
      const double den = s(i) + lam;
      if (den <= 0) {
        if (n(i) > 0) return std::numeric_limits<double>::infinity();
        continue;
      }
      p += n(i) / (den * den);
    }
    return p;
  };
  auto assemble = [&](double lam) {
    VectorXd scale(s.size());
    for (int i = 0; i < s.size(); ++i) {
      const double den = s(i) + lam;
      scale(i) = den > s_eps ? 1.0 / den : 0.0;
    }
    return CMat(es.eigenvectors() * (scale.asDiagonal() * Z));
  };

  // lambda = 0 is optimal when the unconstrained maximizer fits the budget.
  bool null_leak = false;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) <= s_eps && n(i) > 1e-24 * h_norm) null_leak = true;
  if (!null_leak) {
    double p0 = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s(i) > s_eps) p0 += n(i) / (s(i) * s(i));
    if (p0 <= P) return assemble(0.0);
  }

  // Safeguarded Newton on 1/sqrt(power(lambda)) = 1/sqrt(P), which is close to linear.
  double lo = 0.0, hi = std::sqrt(h_norm / P);
  double lam = hi;
  const double target = 1.0 / std::sqrt(P);
  for (int it = 0; it < 200; ++it) {
    const double p = power(lam);
    if (p > P)
      lo = lam;
    else
      hi = lam;
    if (std::abs(p - P) <= 1e-13 * P || hi - lo <= tol * hi) break;
    double dp = 0;
    for (int i = 0; i < s.size(); ++i) {
      const double den = s(i) + lam;
      dp += -2.0 * n(i) / (den * den * den);
    }
    const double f = 1.0 / std::sqrt(p) - target;
    const double df = -0.5 * std::pow(p, -1.5) * dp;
    double next = lam - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    lam = next;
  }
  // Newton approaches from below, so a rounding-level overshoot is left to the rescale guard.
  if (power(lam) > P * (1.0 + 1e-9)) lam = hi;
  if (lambda_out) *lambda_out = lam;
  CMat W = assemble(lam);
  // Guard the last ulp against rounding in the reconstruction.
  const double pw = W.squaredNorm();
  if (pw > P) W *= std::sqrt(P / pw);
  return W;
}

CMat prox_step(const CMat& W_tilde, const CMat& F, double f_tilde, double P) {
  const CMat free_step = W_tilde - F / f_tilde;
  if (free_step.squaredNorm() <= P) return free_step;
  const CMat num = f_tilde * W_tilde - F;
  const double lam = 0.5 * f_tilde - 0.5 * std::sqrt(num.squaredNorm() / P);
  CMat W = num / (f_tilde - 2.0 * lam);
  const double pw = W.squaredNorm();
  if (pw > P) W *= std::sqrt(P / pw);
  return W;
}

CMat update_w_proxlinear(const CMat& G, const CMat& H, double P, const CMat& W_old,
                         ProxMemory& mem, double tol) {
  Eigen::SelfAdjointEigenSolver<CMat> es(G, Eigen::EigenvaluesOnly);
  const double f_tilde = 2.0 * es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(f_tilde > 0)) {
    mem.first = true;
    mem.W_prev = W_old;
    return update_w_lagrangian(G, H, P, W_old, tol);
  }
  double weight = 0.0, d_new = 1.0;
  if (!mem.first) {
    const double d_old = mem.d_prev;
    d_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * d_old * d_old));
    weight = std::min((d_new - 1.0) / d_old, 0.9999 * std::sqrt(mem.f_prev / f_tilde));
  }
  const CMat W_tilde = mem.first ? W_old : CMat(W_old + weight * (W_old - mem.W_prev));
  const CMat F = 2.0 * (G * W_tilde - H);
  CMat W = prox_step(W_tilde, F, f_tilde, P);
  mem.first = false;
  mem.W_prev = W_old;
  mem.d_prev = d_new;
  mem.f_prev = f_tilde;
  return W;
}

VectorXd update_eta(const P2Instance& inst, const VectorXd& eta, const CMat& W_new,
                    const CMat& W_lin, const VectorXd& mu, int t_bar, double delta_s) {
  if (t_bar < 1) throw ContractViolation("iteration counter starts at 1");
  VectorXd out(eta.size());
  const double step = delta_s / std::sqrt(double(t_bar));
  for (std::size_t q = 0; q < inst.radar.size(); ++q) {
    const double slack = sca_sum(inst.radar[q].v, W_new, W_lin) - mu(q);
    out(q) = std::max(eta(q) - step * slack, 0.0);
  }
  return out;
}

CMat mrt_beamformer(const std::vector<CVec>& g_hat, double P) {
  if (g_hat.empty()) throw ContractViolation("no users");
  const int K = static_cast<int>(g_hat.size());
  CMat W(g_hat[0].size(), K);
  const double amp = std::sqrt(P / K);
  for (int k = 0; k < K; ++k) {
    const double nrm = g_hat[k].norm();
    if (!(nrm > 0)) throw ContractViolation("zero channel estimate");
    W.col(k) = amp * g_hat[k] / nrm;
  }
  return W;
}

const char* to_string(Block b) {
  switch (b) {
    case Block::Alpha: return "alpha";
    case Block::Beta: return "beta";
    case Block::Mu: return "mu";
    case Block::W: return "W";
    case Block::Eta: return "eta";
  }
  return "?";
}

namespace {
double safe_utility(const P2Instance& inst, const CMat& W, UtilityParts* parts) {
  try {
    *parts = instance_utility(inst, W);
    return parts->total();
  } catch (const NoIllumination&) {
    return -std::numeric_limits<double>::infinity();
  }
}
}  // namespace

P2Result solve_mrt(const P2Instance& inst) {
  P2Result r;
  r.W = mrt_beamformer(inst.g_hat, inst.P);
  audit_power(r.W, inst.P);
  r.utility = safe_utility(inst, r.W, &r.parts);
  r.converged = true;
  return r;
}

P2Result solve_p2(const P2Instance& inst, const SolverOptions& opts, double delta_s,
                  const BlockObserver& observer, std::vector<SolverTraceRow>* trace) {
  FpVars v;
  v.W = mrt_beamformer(inst.g_hat, inst.P);
  audit_power(v.W, inst.P);
  v.alpha = sinr_vector(inst, v.W);
  v.beta = update_beta(inst, v.W, v.alpha);
  const int nq = static_cast<int>(inst.radar.size());
  v.mu.resize(nq);
  for (int q = 0; q < nq; ++q) v.mu(q) = beam_projection(inst.radar[q].v, v.W).squaredNorm();
  v.eta = VectorXd::Constant(nq, opts.eta0);

  std::vector<SolverTraceRow> local_trace;
  if (!trace && g_trace) trace = &local_trace;

  P2Result best;
  best.W = v.W;
  best.utility = safe_utility(inst, v.W, &best.parts);
  if (trace) trace->push_back({0, best.utility, v.W.squaredNorm()});

  ProxMemory mem;
  double prev = std::numeric_limits<double>::quiet_NaN();
  auto notify = [&](Block b, int it, const CMat& W_lin) {
    if (observer) observer(BlockEvent{b, it, v, W_lin});
  };

  int it = 1;
  for (; it <= opts.max_outer_iters; ++it) {
    const CMat W_lin = v.W;
    v.alpha = update_alpha(inst, v.W, v.beta);
    notify(Block::Alpha, it, W_lin);
    v.beta = update_beta(inst, v.W, v.alpha);
    notify(Block::Beta, it, W_lin);
    v.mu = update_mu(inst, v.eta, opts.mu_tol);
    notify(Block::Mu, it, W_lin);

    const CMat G = interference_matrix(inst, v.beta);
    const CMat H = linear_terms(inst, W_lin, v.alpha, v.beta, v.eta);
    v.W = opts.mode == WUpdateMode::Lagrangian
              ? update_w_lagrangian(G, H, inst.P, W_lin, opts.lambda_tol)
              : update_w_proxlinear(G, H, inst.P, W_lin, mem, opts.lambda_tol);
    audit_power(v.W, inst.P);
    notify(Block::W, it, W_lin);

    const VectorXd eta_old = v.eta;
    if (!opts.freeze_eta) v.eta = update_eta(inst, v.eta, v.W, W_lin, v.mu, it, delta_s);
    notify(Block::Eta, it, W_lin);

    UtilityParts parts;
    const double u = safe_utility(inst, v.W, &parts);
    if (trace) trace->push_back({it, u, v.W.squaredNorm()});
    if (u > best.utility) {
      best.utility = u;
      best.parts = parts;
      best.W = v.W;
    }
    // A flat objective alone is not convergence: the diminishing dual step keeps moving eta, and
    // the objective can pause for an iteration while it does.
    const double obj = fc_tilde(inst, v.W, v.alpha, v.beta) - fr(inst, v.mu);
    const double eta_scale = std::max(1.0, v.eta.size() ? v.eta.cwiseAbs().maxCoeff() : 0.0);
    const bool dual_settled =
        v.eta.size() == 0 || (v.eta - eta_old).cwiseAbs().maxCoeff() <= opts.tol * eta_scale;
    if (dual_settled && std::isfinite(obj) && std::isfinite(prev) &&
        std::abs(obj - prev) <= opts.tol * std::max(1.0, std::abs(prev))) {
      best.converged = true;
      break;
    }
    prev = obj;
  }
  best.iters = std::min(it, opts.max_outer_iters);
  if (trace == &local_trace) {
    const long long id = g_trace_solve++;
    char buf[128];
    for (const auto& row : local_trace) {
      std::snprintf(buf, sizeof buf, "%lld,%d,%.9g,%.9g\n", id, row.iter, row.utility, row.power);
      *g_trace << buf;
    }
  }
  if (!std::isfinite(best.utility)) throw SolverFailure("no beamformer illuminates the selected targets");
  return best;
}

}  // namespace isac

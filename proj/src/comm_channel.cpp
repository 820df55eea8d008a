// SPDX-License-Identifier: Apache-2.0
#include "isac/comm_channel.hpp"

#include <cmath>

namespace isac {

CVec draw_complex_normal(Rng& rng, int n, double var) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.complex_normal(var);
  return v;
}

CVec evolve_true_channel(const CVec& g, double rho, double beta_bar, const CVec& innovation) {
  return rho * g + std::sqrt((1.0 - rho * rho) * beta_bar) * innovation;
}

CVec evolve_true_channel(const CVec& g, double rho, double beta_bar, Rng& rng) {
  return evolve_true_channel(g, rho, beta_bar, draw_complex_normal(rng, int(g.size()), 1.0));
}

double mmse_kappa(const CommUserParams& p, int D) {
  const double s = D * p.beta_bar * p.P_u;
  return s / (s + p.delta_ul);
}

CsiBranch predict_csi(const CsiBranch& prev, const CommUserParams& p) {
  const double r2 = p.rho * p.rho;
  return {p.rho * prev.g_hat, r2 * prev.varsigma + (1.0 - r2) * p.beta_bar};
}

CsiBranch estimate_csi(const CVec& g_true, const CommUserParams& p, int D, const CVec& noise) {
  const double kappa = mmse_kappa(p, D);
  const double noise_std = std::sqrt(p.delta_ul / (D * p.P_u));
  return {kappa * (g_true + noise_std * noise), p.beta_bar * (1.0 - kappa)};
}

CsiBranch update_csi(const CommChannelState& s, bool reestimate, const CommUserParams& p, int D,
                     Rng& rng) {
  if (!reestimate) return predict_csi({s.g_hat, s.varsigma}, p);
  return estimate_csi(s.g_true, p, D, draw_complex_normal(rng, int(s.g_true.size()), 1.0));
}

CommChannelState initial_channel(const CommUserParams& p, int L_T, Rng& channel_rng,
                                 Rng& estimation_rng) {
  CommChannelState s;
  s.g_true = draw_complex_normal(channel_rng, L_T, p.beta_bar);
  s.g_hat = s.g_true + draw_complex_normal(estimation_rng, L_T, p.varsigma_0);
  s.varsigma = p.varsigma_0;
  return s;
}

double effective_rate(const CVec& g_hat, double varsigma, const CMat& W, int k, int M, int M1,
                      double sigma_k, double P) {
  if (M1 < 0 || M1 > M) throw ContractViolation("pilot overhead exceeds the frame");
  if (M1 == M) return 0.0;
  const Eigen::RowVectorXcd proj = g_hat.adjoint() * W;
  const double signal = std::norm(proj(k));
  const double interference = proj.squaredNorm() - signal;
  const double sinr = signal / (std::max(interference, 0.0) + varsigma * P + sigma_k);
  return (double(M - M1) / M) * std::log1p(sinr);
}

}  // namespace isac

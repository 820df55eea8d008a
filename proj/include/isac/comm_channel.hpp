// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "isac/config.hpp"
#include "isac/rng.hpp"
#include "isac/types.hpp"

namespace isac {

struct CommChannelState {
  CVec g_true;
  CVec g_hat;
  double varsigma = 0;
};

/// Estimate and error variance after one update.
struct CsiBranch {
  CVec g_hat;
  double varsigma = 0;
};

/// Vector of i.i.d. CN(0, var) entries.
CVec draw_complex_normal(Rng& rng, int n, double var);

/// Gauss-Markov aging step; `innovation` holds CN(0,1) entries.
CVec evolve_true_channel(const CVec& g, double rho, double beta_bar, const CVec& innovation);
CVec evolve_true_channel(const CVec& g, double rho, double beta_bar, Rng& rng);

/// MMSE shrinkage factor for a length-D pilot.
double mmse_kappa(const CommUserParams& p, int D);

CsiBranch predict_csi(const CsiBranch& prev, const CommUserParams& p);
/// Re-estimate from the true channel; `noise` holds CN(0,1) entries.
CsiBranch estimate_csi(const CVec& g_true, const CommUserParams& p, int D, const CVec& noise);

/// One update: bit 0 predicts, bit 1 re-estimates. g_true must already be at frame n.
CsiBranch update_csi(const CommChannelState& s, bool reestimate, const CommUserParams& p, int D,
                     Rng& rng);

/// Initial estimate: truth plus error of variance varsigma_0.
CommChannelState initial_channel(const CommUserParams& p, int L_T, Rng& channel_rng,
                                 Rng& estimation_rng);

/// Achievable rate in nats/s/Hz after the pilot overhead M1.
double effective_rate(const CVec& g_hat, double varsigma, const CMat& W, int k, int M, int M1,
                      double sigma_k, double P);

}  // namespace isac

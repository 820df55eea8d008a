// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "isac/mlp.hpp"
#include "isac/world.hpp"

namespace isac {

/// Binary vectors respecting the ordering of `a_tilde`, the first being the 0.5 threshold.
std::vector<Bits> order_preserving_quantize(const VectorXd& a_tilde, int count);
/// Same, writing into `out` and reusing its storage.
void order_preserving_quantize_into(const double* a_tilde, int X, int count,
                                    std::vector<Bits>& out);

/// True when a[l] >= a[m] whenever a_tilde[l] >= a_tilde[m] (ties must agree).
bool is_order_preserving(const VectorXd& a_tilde, const Bits& a);

/// Exploration state of the actor for both decision vectors.
struct ActorParams {
  int K_tilde_c = 1;
  int K_tilde_r = 1;
  double P_c = 0;
  double P_r = 0;
  double A_c = 1.9;
  double A_r = 1.0;
  int Delta_c = 4;
  int Delta_r = 4;
  std::vector<int> I_c, I_r;          // selected 1-based indices per frame
  std::vector<int> count_c, count_r;  // realized candidate counts per frame
};

ActorParams initial_actor(const DrolConfig& cfg, int K, int Q);
/// Smallest and largest admissible base count for dimension X.
int min_base_count(double A);

struct Candidates {
  std::vector<Bits> list;
  bool noisy = false;
  int count() const { return static_cast<int>(list.size()); }
};

Candidates generate_candidates(const VectorXd& a_tilde, int K_tilde, double P_explore, Rng& rng);
/// All 2^X vectors in binary counting order (first entry is the most significant bit).
std::vector<Bits> exhaustive_candidates(int X);

/// Entry-wise OR: a user is charged for pilots if any explored decision estimated it.
Bits practical_decision(const std::vector<Bits>& candidates);

/// Updates the base counts at refresh frames and the exploration probabilities every frame.
void refine_exploration_params(ActorParams& a, int n, RefineBasis basis, int K, int Q);
/// One refresh rule, exposed for tests: mean of mod(I_l, X_l) over the window, plus one.
int refined_count(const std::vector<int>& indices, const std::vector<int>& moduli, double A,
                  int X);

struct CriticChoice {
  int i = 0;  // 0-based
  int j = 0;
  P2Result result;
  int failures = 0;
};

using PairSolver = std::function<const P2Result&(const Bits&, const Bits&)>;

/// Solves every candidate pair; highest utility wins, ties go to the lowest (i, j).
CriticChoice critic_select(const std::vector<Bits>& cands_c, const std::vector<Bits>& cands_r,
                           const PairSolver& solve);

struct DrolState {
  Mlp mlp;
  Adam adam;
  ReplayMemory memory;
  RunningNormalizer norm;
  ActorParams actor;
  Rng exploration;
  Rng replay;
  /// Replace the actor's candidates with every possible decision (diagnostics).
  bool force_exhaustive = false;
};

DrolState make_drol_state(const Scenario& sc, std::uint64_t seed);

/// One ADAM step on a replay batch; NaN while the memory is below the warmup size.
double train_step(DrolState& s, int batch_size, int warmup);

struct DrolFrameOptions {
  Beamformer bf = Beamformer::FpSca;
  bool practical = true;
};

/// Full learner step for frame n: act, criticize, learn, then commit to the world.
FrameRecord run_drol_frame(const Scenario& sc, World& w, DrolState& s, FrameContext& ctx,
                           const DrolFrameOptions& opt);

}  // namespace isac

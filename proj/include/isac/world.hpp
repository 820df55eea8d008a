// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "isac/beamforming.hpp"
#include "isac/comm_channel.hpp"
#include "isac/radar_tracking.hpp"
#include "isac/rng.hpp"
#include "isac/scenario.hpp"

namespace isac {

/// Simulated environment plus the tracker/estimator beliefs at the end of a frame.
struct World {
  int frame = 0;  // number of committed frames
  std::vector<CommChannelState> users;
  std::vector<Vec3> x_true;
  std::vector<TrackState> tracks;
  Rng channel;
  Rng estimation;
  Rng state;
  Rng measurement;

  bool operator==(const World& o) const;
};

World make_world(const Scenario& sc, std::uint64_t seed);

enum class Beamformer { FpSca, Mrt };
const char* to_string(Beamformer b);

/// Everything about frame n that does not depend on the decision, plus solve caches.
struct FrameContext {
  int n = 0;
  std::vector<CVec> g_true;
  std::vector<CsiBranch> pred;
  std::vector<CsiBranch> est;
  std::vector<Vec3> x_true;
  std::vector<EkfPrediction> radar_pred;
  std::vector<Vec3> meas_noise;  // standard normal draws
  Rng channel, estimation, state, measurement;

  std::map<std::pair<int, int>, ErrorTerms> terms_cache;  // (target, M2)
  std::map<std::pair<int, int>, CrbCoefficients> crb_cache;
  std::map<std::string, P2Result> solve_cache;
  long long solves = 0;  // actual (uncached) solver calls
};

/// Advances truth and computes both update branches for every entity. Does not modify `w`.
FrameContext prepare_frame(const Scenario& sc, const World& w);

int pilot_overhead(const Scenario& sc, const Bits& a_c);
bool stage_one_feasible(const Scenario& sc, const Bits& a_c);

const CrbCoefficients& frame_crb(const Scenario& sc, FrameContext& ctx, int q, int M2);
std::vector<CsiBranch> csi_branches(const FrameContext& ctx, const Bits& a_c);
std::vector<TargetBranch> target_branches(const Scenario& sc, FrameContext& ctx,
                                          const Bits& a_c, const Bits& a_r);
P2Instance frame_instance(const Scenario& sc, FrameContext& ctx, const Bits& a_c,
                          const Bits& a_r);

/// Solves (or recalls) the beamforming problem for one decision pair.
const P2Result& solve_pair(const Scenario& sc, FrameContext& ctx, const Bits& a_c,
                           const Bits& a_r, Beamformer bf);

/// Applies the chosen decisions and beamformer; the world advances by one frame.
void commit(const Scenario& sc, World& w, FrameContext& ctx, const Bits& a_c, const Bits& a_r,
            const CMat& W);

/// Raw (unnormalized) learner input built from the beliefs in `w`.
Eigen::VectorXd featurize(const World& w);
int feature_dim(int K, int L_T, int Q);

struct FrameRecord {
  int frame = 0;
  double U_genie = 0;
  double U_practical = 0;
  double comm_sum = 0;
  double radar_sum = 0;
  Bits a_c;
  Bits a_r;
  int K_c = 1;
  int K_r = 1;
  int I_c = 1;
  int I_r = 1;
  double loss = 0;
  int M1 = 0;
  int solver_iters = 0;
  double wall_ms = 0;
};

}  // namespace isac

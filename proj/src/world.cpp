// SPDX-License-Identifier: Apache-2.0
#include "isac/world.hpp"

namespace isac {

bool World::operator==(const World& o) const {
  if (frame != o.frame || users.size() != o.users.size() || tracks.size() != o.tracks.size())
    return false;
  for (std::size_t k = 0; k < users.size(); ++k)
    if (users[k].g_true != o.users[k].g_true || users[k].g_hat != o.users[k].g_hat ||
        users[k].varsigma != o.users[k].varsigma)
      return false;
  for (std::size_t q = 0; q < tracks.size(); ++q)
    if (x_true[q] != o.x_true[q] || tracks[q].x_hat != o.tracks[q].x_hat ||
        tracks[q].M != o.tracks[q].M)
      return false;
  return channel == o.channel && estimation == o.estimation && state == o.state &&
         measurement == o.measurement;
}

World make_world(const Scenario& sc, std::uint64_t seed) {
  RngStreams rs(seed);
  World w;
  w.channel = rs.get(Stream::ChannelEvolution);
  w.estimation = rs.get(Stream::EstimationNoise);
  w.state = rs.get(Stream::StateEvolution);
  w.measurement = rs.get(Stream::MeasurementNoise);
  for (const auto& u : sc.users)
    w.users.push_back(initial_channel(u, sc.sys.L_T, w.channel, w.estimation));
  for (const auto& t : sc.targets) {
    w.x_true.push_back(t.x0);
    Eigen::SelfAdjointEigenSolver<Mat3> es(t.M0);
    const Vec3 root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Vec3 u(w.state.normal(), w.state.normal(), w.state.normal());
    TrackState tr;
    tr.x_hat = t.x0 + es.eigenvectors() * root.asDiagonal() * u;
    tr.M = t.M0;
    w.tracks.push_back(tr);
  }
  return w;
}

const char* to_string(Beamformer b) { return b == Beamformer::FpSca ? "fp-sca" : "mrt"; }

FrameContext prepare_frame(const Scenario& sc, const World& w) {
  FrameContext ctx;
  ctx.n = w.frame + 1;
  ctx.channel = w.channel;
  ctx.estimation = w.estimation;
  ctx.state = w.state;
  ctx.measurement = w.measurement;
  const int L = sc.sys.L_T;
  for (int k = 0; k < sc.K(); ++k) {
    const CommUserParams& p = sc.users[k];
    const CommChannelState& s = w.users[k];
    const CVec innovation = draw_complex_normal(ctx.channel, L, 1.0);
    const CVec noise = draw_complex_normal(ctx.estimation, L, 1.0);
    ctx.g_true.push_back(evolve_true_channel(s.g_true, p.rho, p.beta_bar, innovation));
    ctx.pred.push_back(predict_csi({s.g_hat, s.varsigma}, p));
    ctx.est.push_back(estimate_csi(ctx.g_true.back(), p, sc.sys.D, noise));
  }
  const double mt = sc.sys.frame_time();
  for (int q = 0; q < sc.Q(); ++q) {
    const Vec3 u(ctx.state.normal(), ctx.state.normal(), ctx.state.normal());
    ctx.x_true.push_back(evolve_true_state(w.x_true[q], sc.targets[q], mt, u));
    ctx.meas_noise.emplace_back(ctx.measurement.normal(), ctx.measurement.normal(),
                                ctx.measurement.normal());
    ctx.radar_pred.push_back(ekf_predict(w.tracks[q], sc.targets[q], mt));
  }
  return ctx;
}

int pilot_overhead(const Scenario& sc, const Bits& a_c) { return sc.sys.D * popcount(a_c); }

bool stage_one_feasible(const Scenario& sc, const Bits& a_c) {
  return popcount(a_c) <= sc.sys.max_estimated_users();
}

const CrbCoefficients& frame_crb(const Scenario& sc, FrameContext& ctx, int q, int M2) {
  const auto key = std::make_pair(q, M2);
  auto it = ctx.crb_cache.find(key);
  if (it != ctx.crb_cache.end()) return it->second;
  const auto& t = sc.targets[q];
  return ctx.crb_cache
      .emplace(key, crb_coefficients(ctx.radar_pred[q].x_tilde, sc.sys, t.sigma_rcs, t.theta_bar, M2))
      .first->second;
}

std::vector<CsiBranch> csi_branches(const FrameContext& ctx, const Bits& a_c) {
  std::vector<CsiBranch> out;
  for (std::size_t k = 0; k < a_c.size(); ++k) out.push_back(a_c[k] ? ctx.est[k] : ctx.pred[k]);
  return out;
}

namespace {
double gain_angle(const Scenario& sc, const FrameContext& ctx, int q) {
  return sc.experiment.gain_at_true_angle ? ctx.x_true[q](kTheta)
                                          : ctx.radar_pred[q].x_tilde(kTheta);
}
}  // namespace

std::vector<TargetBranch> target_branches(const Scenario& sc, FrameContext& ctx,
                                          const Bits& a_c, const Bits& a_r) {
  const int M2 = sc.sys.M - pilot_overhead(sc, a_c);
  std::vector<TargetBranch> out;
  for (int q = 0; q < sc.Q(); ++q) {
    TargetBranch b;
    b.reestimate = a_r[q] != 0;
    b.theta_tilde = gain_angle(sc, ctx, q);
    if (b.reestimate) {
      const auto key = std::make_pair(q, M2);
      auto it = ctx.terms_cache.find(key);
      if (it == ctx.terms_cache.end())
        it = ctx.terms_cache
                 .emplace(key, eigen_error_terms(ctx.radar_pred[q].M_tilde,
                                                 frame_crb(sc, ctx, q, M2), sc.sys.omega))
                 .first;
      b.terms = it->second;
    } else {
      const Mat3& Mt = ctx.radar_pred[q].M_tilde;
      for (int j = 0; j < 3; ++j) b.terms.psi_tilde += sc.sys.omega[j] * Mt(j, j);
    }
    out.push_back(b);
  }
  return out;
}

P2Instance frame_instance(const Scenario& sc, FrameContext& ctx, const Bits& a_c,
                          const Bits& a_r) {
  if (static_cast<int>(a_c.size()) != sc.K() || static_cast<int>(a_r.size()) != sc.Q())
    throw ContractViolation("decision length mismatch");
  if (!stage_one_feasible(sc, a_c)) throw ContractViolation("too many users estimated in one frame");
  return make_instance(sc.sys, sc.users, csi_branches(ctx, a_c), target_branches(sc, ctx, a_c, a_r),
                       pilot_overhead(sc, a_c));
}

const P2Result& solve_pair(const Scenario& sc, FrameContext& ctx, const Bits& a_c,
                           const Bits& a_r, Beamformer bf) {
  const std::string key = std::string(to_string(bf)) + ":" + bits_to_string(a_c) + "|" +
                          bits_to_string(a_r);
  auto it = ctx.solve_cache.find(key);
  if (it != ctx.solve_cache.end()) return it->second;
  const P2Instance inst = frame_instance(sc, ctx, a_c, a_r);
  P2Result r = bf == Beamformer::FpSca ? solve_p2(inst, sc.solver, sc.sys.delta_s) : solve_mrt(inst);
  ++ctx.solves;
  return ctx.solve_cache.emplace(key, std::move(r)).first->second;
}

void commit(const Scenario& sc, World& w, FrameContext& ctx, const Bits& a_c, const Bits& a_r,
            const CMat& W) {
  if (ctx.n != w.frame + 1) throw ContractViolation("frame context does not follow the world");
  const int M2 = sc.sys.M - pilot_overhead(sc, a_c);
  // Compute every new value before touching the world so a failure leaves it intact.
  std::vector<TrackState> tracks;
  for (int q = 0; q < sc.Q(); ++q) {
    const EkfPrediction& pred = ctx.radar_pred[q];
    if (!a_r[q]) {
      tracks.push_back({pred.x_tilde, pred.M_tilde});
      continue;
    }
    const double gamma = sensing_gain(W, gain_angle(sc, ctx, q));
    const CrbCoefficients& crb = frame_crb(sc, ctx, q, M2);
    const Vec3 x_bar = synthesize_measurement(ctx.x_true[q], crb, gamma, ctx.meas_noise[q]);
    tracks.push_back(ekf_update(pred, x_bar, crb, gamma));
  }
  const std::vector<CsiBranch> csi = csi_branches(ctx, a_c);

  for (int k = 0; k < sc.K(); ++k) {
    w.users[k].g_true = ctx.g_true[k];
    w.users[k].g_hat = csi[k].g_hat;
    w.users[k].varsigma = csi[k].varsigma;
  }
  w.x_true = ctx.x_true;
  w.tracks = std::move(tracks);
  w.channel = ctx.channel;
  w.estimation = ctx.estimation;
  w.state = ctx.state;
  w.measurement = ctx.measurement;
  w.frame = ctx.n;
}

int feature_dim(int K, int L_T, int Q) { return K * (2 * L_T + 1) + 12 * Q; }

Eigen::VectorXd featurize(const World& w) {
  const int K = static_cast<int>(w.users.size());
  const int L = K > 0 ? static_cast<int>(w.users[0].g_hat.size()) : 0;
  const int Q = static_cast<int>(w.tracks.size());
  Eigen::VectorXd f(feature_dim(K, L, Q));
  int i = 0;
  for (const auto& u : w.users) {
    for (int l = 0; l < L; ++l) f(i++) = u.g_hat(l).real();
    for (int l = 0; l < L; ++l) f(i++) = u.g_hat(l).imag();
    f(i++) = u.varsigma;
  }
  for (const auto& t : w.tracks) {
    for (int j = 0; j < 3; ++j) f(i++) = t.x_hat(j);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) f(i++) = t.M(r, c);
  }
  if (!f.allFinite()) throw ContractViolation("non-finite learner feature");
  return f;
}

}  // namespace isac

// SPDX-License-Identifier: Apache-2.0
#include "isac/drol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace isac {

void order_preserving_quantize_into(const double* a, int X, int count, std::vector<Bits>& out) {
  if (count < 1 || count > X + 1) throw ContractViolation("candidate count out of range");
  out.resize(count);
  for (auto& b : out) b.resize(X);
  for (int l = 0; l < X; ++l) out[0][l] = a[l] >= 0.5;
  if (count == 1) return;

  // Entries ordered by distance to 0.5, ties by position.
  int order[64];
  std::vector<int> big;
  int* ord = order;
  if (X > 64) {
    big.resize(X);
    ord = big.data();
  }
  for (int l = 0; l < X; ++l) ord[l] = l;
  std::stable_sort(ord, ord + X, [&](int x, int y) {
    return std::abs(a[x] - 0.5) < std::abs(a[y] - 0.5);
  });
  for (int i = 2; i <= count; ++i) {
    const double t = a[ord[i - 2]];
    Bits& b = out[i - 1];
    for (int l = 0; l < X; ++l) b[l] = a[l] > t || (a[l] == t && t <= 0.5);
  }
}

std::vector<Bits> order_preserving_quantize(const VectorXd& a, int count) {
  std::vector<Bits> out;
  order_preserving_quantize_into(a.data(), static_cast<int>(a.size()), count, out);
  return out;
}

bool is_order_preserving(const VectorXd& a_tilde, const Bits& a) {
  for (int l = 0; l < a_tilde.size(); ++l)
    for (int m = 0; m < a_tilde.size(); ++m)
      if (a_tilde(l) >= a_tilde(m) && a[l] < a[m]) return false;
  return true;
}

int min_base_count(double A) { return std::max(1, static_cast<int>(std::ceil(A - 1e-12))); }

ActorParams initial_actor(const DrolConfig& cfg, int K, int Q) {
  ActorParams a;
  a.A_c = cfg.A_c;
  a.A_r = cfg.A_r;
  a.Delta_c = cfg.refine_interval_c;
  a.Delta_r = cfg.refine_interval_r;
  a.K_tilde_c = cfg.K_tilde_c0 > 0 ? cfg.K_tilde_c0 : K + 1;
  a.K_tilde_r = cfg.K_tilde_r0 > 0 ? cfg.K_tilde_r0 : Q + 1;
  a.K_tilde_c = std::clamp(a.K_tilde_c, min_base_count(a.A_c), K + 1);
  a.K_tilde_r = std::clamp(a.K_tilde_r, min_base_count(a.A_r), Q + 1);
  a.P_c = std::clamp(1.0 - a.A_c / a.K_tilde_c, 0.0, 1.0);
  a.P_r = std::clamp(1.0 - a.A_r / a.K_tilde_r, 0.0, 1.0);
  return a;
}

Candidates generate_candidates(const VectorXd& a_tilde, int K_tilde, double P_explore, Rng& rng) {
  Candidates c;
  c.list = order_preserving_quantize(a_tilde, K_tilde);
  c.noisy = rng.bernoulli(P_explore);
  if (c.noisy) {
    VectorXd noisy(a_tilde.size());
    for (int l = 0; l < a_tilde.size(); ++l)
      noisy(l) = 1.0 / (1.0 + std::exp(-(a_tilde(l) + rng.normal())));
    for (auto& b : order_preserving_quantize(noisy, K_tilde)) c.list.push_back(std::move(b));
  }
  return c;
}

std::vector<Bits> exhaustive_candidates(int X) {
  std::vector<Bits> out;
  for (long m = 0; m < (1L << X); ++m) {
    Bits b(X);
    for (int l = 0; l < X; ++l) b[l] = (m >> (X - 1 - l)) & 1;
    out.push_back(b);
  }
  return out;
}

Bits practical_decision(const std::vector<Bits>& candidates) {
  if (candidates.empty()) throw ContractViolation("no candidates");
  Bits out(candidates[0].size(), 0);
  for (const auto& c : candidates)
    for (std::size_t l = 0; l < c.size(); ++l) out[l] |= c[l];
  return out;
}

int refined_count(const std::vector<int>& indices, const std::vector<int>& moduli, double A,
                  int X) {
  long sum = 0;
  for (std::size_t l = 0; l < indices.size(); ++l) sum += indices[l] % moduli[l];
  const int k = static_cast<int>(sum / static_cast<long>(indices.size())) + 1;
  return std::clamp(k, min_base_count(A), X + 1);
}

namespace {
void refine_one(int n, int delta, const std::vector<int>& I, const std::vector<int>& counts,
                RefineBasis basis, int X, double A, int& K_tilde, double& P) {
  if (n % delta == 0 && static_cast<int>(I.size()) >= delta) {
    std::vector<int> idx(I.end() - delta, I.end());
    std::vector<int> mod(delta, X);
    if (basis == RefineBasis::CandidateCount) mod.assign(counts.end() - delta, counts.end());
    K_tilde = refined_count(idx, mod, A, X);
  }
  P = std::clamp(1.0 - A / K_tilde, 0.0, 1.0);
}
}  // namespace

void refine_exploration_params(ActorParams& a, int n, RefineBasis basis, int K, int Q) {
  refine_one(n, a.Delta_c, a.I_c, a.count_c, basis, K, a.A_c, a.K_tilde_c, a.P_c);
  refine_one(n, a.Delta_r, a.I_r, a.count_r, basis, Q, a.A_r, a.K_tilde_r, a.P_r);
}

CriticChoice critic_select(const std::vector<Bits>& cands_c, const std::vector<Bits>& cands_r,
                           const PairSolver& solve) {
  if (cands_c.empty() || cands_r.empty()) throw ContractViolation("empty candidate list");
  CriticChoice best;
  bool found = false;
  for (std::size_t i = 0; i < cands_c.size(); ++i) {
    for (std::size_t j = 0; j < cands_r.size(); ++j) {
      try {
        const P2Result& r = solve(cands_c[i], cands_r[j]);
        if (!found || r.utility > best.result.utility) {
          best.i = static_cast<int>(i);
          best.j = static_cast<int>(j);
          best.result = r;
          found = true;
        }
      } catch (const Error&) {
        ++best.failures;
      }
    }
  }
  if (!found) throw SolverFailure("every candidate pair failed");
  return best;
}

DrolState make_drol_state(const Scenario& sc, std::uint64_t seed) {
  RngStreams rs(seed);
  DrolState s;
  const int in = feature_dim(sc.K(), sc.sys.L_T, sc.Q());
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), sc.drol.hidden.begin(), sc.drol.hidden.end());
  sizes.push_back(sc.K() + sc.Q());
  s.mlp = Mlp::create(sizes, sc.drol.leaky_slope, rs.get(Stream::DnnInit));
  s.adam = Adam::create(s.mlp, sc.drol.learning_rate);
  s.memory = ReplayMemory(sc.drol.memory_capacity);
  s.norm = RunningNormalizer(in);
  s.actor = initial_actor(sc.drol, sc.K(), sc.Q());
  s.exploration = rs.get(Stream::ExplorationNoise);
  s.replay = rs.get(Stream::ReplaySampling);
  return s;
}

double train_step(DrolState& s, int batch_size, int warmup) {
  if (s.memory.size() < warmup) return std::numeric_limits<double>::quiet_NaN();
  const std::vector<int> idx = s.memory.sample_indices(batch_size, s.replay);
  const int in = s.mlp.input_dim(), out = s.mlp.output_dim();
  MatrixXd X(in, idx.size()), Y(out, idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) {
    const ReplaySample& r = s.memory.at(idx[c]);
    X.col(c) = s.norm.apply(r.feature);
    for (int o = 0; o < out; ++o) Y(o, c) = r.target[o];
  }
  MlpGrads g;
  const double loss = bce_loss_and_grad(s.mlp, X, Y, &g);
  s.adam.step(s.mlp, g);
  return loss;
}

FrameRecord run_drol_frame(const Scenario& sc, World& w, DrolState& s, FrameContext& ctx,
                           const DrolFrameOptions& opt) {
  const int K = sc.K(), Q = sc.Q();
  const VectorXd S = featurize(w);
  s.norm.update(S);
  const VectorXd relaxed = s.mlp.forward(s.norm.apply(S));

  Candidates cc, cr;
  if (s.force_exhaustive) {
    cc.list = exhaustive_candidates(K);
    cr.list = exhaustive_candidates(Q);
  } else {
    cc = generate_candidates(relaxed.head(K), s.actor.K_tilde_c, s.actor.P_c, s.exploration);
    cr = generate_candidates(relaxed.tail(Q), s.actor.K_tilde_r, s.actor.P_r, s.exploration);
  }
  std::vector<Bits> feasible_c;
  for (auto& b : cc.list)
    if (stage_one_feasible(sc, b)) feasible_c.push_back(b);
  if (feasible_c.empty()) feasible_c.push_back(Bits(K, 0));

  const CriticChoice choice = critic_select(feasible_c, cr.list, [&](const Bits& a, const Bits& b) -> const P2Result& {
    return solve_pair(sc, ctx, a, b, opt.bf);
  });
  const Bits a_c = feasible_c[choice.i];
  const Bits a_r = cr.list[choice.j];

  s.actor.I_c.push_back(choice.i + 1);
  s.actor.I_r.push_back(choice.j + 1);
  s.actor.count_c.push_back(static_cast<int>(feasible_c.size()));
  s.actor.count_r.push_back(cr.count());
  refine_exploration_params(s.actor, ctx.n, sc.drol.refine_basis, K, Q);

  Bits target = a_c;
  target.insert(target.end(), a_r.begin(), a_r.end());
  s.memory.push({S, target});
  const double loss = train_step(s, sc.drol.batch_size, sc.drol.warmup());

  FrameRecord rec;
  rec.frame = ctx.n;
  rec.U_genie = choice.result.utility;
  rec.comm_sum = choice.result.parts.comm;
  rec.radar_sum = choice.result.parts.radar;
  rec.U_practical = std::numeric_limits<double>::quiet_NaN();
  if (opt.practical) {
    Bits a_p = practical_decision(feasible_c);
    if (!stage_one_feasible(sc, a_p)) a_p = a_c;
    rec.U_practical = solve_pair(sc, ctx, a_p, a_r, opt.bf).utility;
  }
  rec.a_c = a_c;
  rec.a_r = a_r;
  rec.K_c = static_cast<int>(feasible_c.size());
  rec.K_r = cr.count();
  rec.I_c = choice.i + 1;
  rec.I_r = choice.j + 1;
  rec.loss = loss;
  rec.M1 = pilot_overhead(sc, a_c);
  rec.solver_iters = choice.result.iters;

  commit(sc, w, ctx, a_c, a_r, choice.result.W);
  return rec;
}

}  // namespace isac

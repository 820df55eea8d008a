// SPDX-License-Identifier: Apache-2.0
#include "isac/baselines.hpp"

#include <limits>

#include "isac/drol.hpp"

namespace isac {

std::string PolicySpec::name() const {
  std::string base;
  switch (policy) {
    case Policy::Drol: base = "drol"; break;
    case Policy::Exhaustive: base = "exhaustive"; break;
    case Policy::Random: base = "random"; break;
    case Policy::AllUpdate: base = "all"; break;
  }
  return bf == Beamformer::Mrt ? base + "-mrt" : base;
}

PolicySpec parse_policy(const std::string& s) {
  PolicySpec p;
  std::string base = s;
  const std::string suffix = "-mrt";
  if (base.size() > suffix.size() && base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0) {
    p.bf = Beamformer::Mrt;
    base.resize(base.size() - suffix.size());
  }
  if (base == "drol") p.policy = Policy::Drol;
  else if (base == "exhaustive") p.policy = Policy::Exhaustive;
  else if (base == "random") p.policy = Policy::Random;
  else if (base == "all" || base == "all-update") p.policy = Policy::AllUpdate;
  else throw ConfigError("unknown policy: " + s);
  return p;
}

ExhaustiveChoice exhaustive_decision(const Scenario& sc, FrameContext& ctx, Beamformer bf) {
  ExhaustiveChoice best;
  best.result.utility = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (const Bits& a_c : exhaustive_candidates(sc.K())) {
    if (!stage_one_feasible(sc, a_c)) continue;
    for (const Bits& a_r : exhaustive_candidates(sc.Q())) {
      try {
        const P2Result& r = solve_pair(sc, ctx, a_c, a_r, bf);
        if (!found || r.utility > best.result.utility) {
          best = {{a_c, a_r}, r};
          found = true;
        }
      } catch (const Error&) {
      }
    }
  }
  if (!found) throw SolverFailure("no feasible decision pair");
  return best;
}

DecisionPair random_decision(int K, int Q, int max_estimated, Rng& rng) {
  DecisionPair d;
  for (;;) {
    d.a_c.assign(K, 0);
    d.a_r.assign(Q, 0);
    for (auto& b : d.a_c) b = rng.bernoulli(0.5);
    for (auto& b : d.a_r) b = rng.bernoulli(0.5);
    if (popcount(d.a_c) <= max_estimated) return d;
  }
}

DecisionPair all_update_decision(const Scenario& sc) {
  DecisionPair d{Bits(sc.K(), 1), Bits(sc.Q(), 1)};
  if (!stage_one_feasible(sc, d.a_c)) throw ContractViolation("pilots for all users do not fit in a frame");
  return d;
}

FrameRecord run_baseline_frame(const PolicySpec& p, const Scenario& sc, World& w,
                               FrameContext& ctx, Rng& random_rng) {
  DecisionPair d;
  P2Result r;
  switch (p.policy) {
    case Policy::Exhaustive: {
      ExhaustiveChoice e = exhaustive_decision(sc, ctx, p.bf);
      d = std::move(e.d);
      r = std::move(e.result);
      break;
    }
    case Policy::Random:
      d = random_decision(sc.K(), sc.Q(), sc.sys.max_estimated_users(), random_rng);
      r = solve_pair(sc, ctx, d.a_c, d.a_r, p.bf);
      break;
    case Policy::AllUpdate:
      d = all_update_decision(sc);
      r = solve_pair(sc, ctx, d.a_c, d.a_r, p.bf);
      break;
    case Policy::Drol:
      throw ContractViolation("the learner is not a baseline");
  }
  FrameRecord rec;
  rec.frame = ctx.n;
  rec.U_genie = r.utility;
  rec.U_practical = r.utility;
  rec.comm_sum = r.parts.comm;
  rec.radar_sum = r.parts.radar;
  rec.a_c = d.a_c;
  rec.a_r = d.a_r;
  rec.loss = std::numeric_limits<double>::quiet_NaN();
  rec.M1 = pilot_overhead(sc, d.a_c);
  rec.solver_iters = r.iters;
  commit(sc, w, ctx, d.a_c, d.a_r, r.W);
  return rec;
}

}  // namespace isac

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>

#include "isac/world.hpp"

namespace isac {

enum class Policy { Drol, Exhaustive, Random, AllUpdate };

struct PolicySpec {
  Policy policy = Policy::Drol;
  Beamformer bf = Beamformer::FpSca;
  std::string name() const;
};

/// Parses "drol", "exhaustive", "random" or "all", with an optional "-mrt" suffix.
PolicySpec parse_policy(const std::string& s);

struct DecisionPair {
  Bits a_c;
  Bits a_r;
};

struct ExhaustiveChoice {
  DecisionPair d;
  P2Result result;
};

/// Best feasible decision pair over all 2^(K+Q) combinations; ties keep the earliest.
ExhaustiveChoice exhaustive_decision(const Scenario& sc, FrameContext& ctx, Beamformer bf);

/// Fair coin flips, redrawn until the pilot budget is met.
DecisionPair random_decision(int K, int Q, int max_estimated, Rng& rng);
DecisionPair all_update_decision(const Scenario& sc);

/// Runs one frame under a fixed baseline policy and commits it.
FrameRecord run_baseline_frame(const PolicySpec& p, const Scenario& sc, World& w,
                               FrameContext& ctx, Rng& random_rng);

}  // namespace isac

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace isac {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  double budget_seconds = 0;
};

/// Criterion ids belonging to a named suite: "fast", "learning", "all" or a single id.
std::vector<int> suite_criteria(const std::string& suite);

/// Runs one criterion; exceptions become failures.
CriterionResult run_criterion(int id);

/// Runs a suite and prints one line per criterion via `sink`; returns true when all pass.
bool run_suite(const std::string& suite, const std::function<void(const CriterionResult&)>& sink,
               std::vector<CriterionResult>* results = nullptr);

std::string format_result(const CriterionResult& r);

}  // namespace isac

#include <cstdint>

#include "isac/beamforming.hpp"
#include "isac/rng.hpp"

namespace isac {

/// Beamforming instance drawn from a desk-preset world after a few random frames.
P2Instance random_desk_instance(std::uint64_t seed);

/// Unit-scale instance with i.i.d. channels, for derivative checks.
P2Instance random_unit_instance(Rng& rng, int L_T, int K, int n_radar);

}  // namespace isac

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "isac/config.hpp"
#include "isac/radar_tracking.hpp"

namespace isac {

/// High-level description of one user, from which channel parameters are derived.
struct UserSpec {
  double rho = 0.9;
  double distance = 4000.0;  // m
  double P_u = 1.0;           // W
  double varsigma_ratio = 0.5;  // initial error variance as a fraction of beta_bar
  double w_c = 0.3;
};

struct TargetSpec {
  Vec3 x0 = Vec3(0.0, 150.0, 30.0);
  double rho_tilde = 1.0;
  /// Heading relative to the initial bearing; pi means a radially receding target.
  double heading_offset = 3.141592653589793;
  double sigma_rcs = 1.0;
  double w_r = 14.0;
};

struct ScenarioSpec {
  std::string preset = "desk";
  SystemConfig sys;
  std::vector<UserSpec> users;
  std::vector<TargetSpec> targets;
  DrolConfig drol;
  SolverOptions solver;
  ExperimentConfig experiment;
};

/// Fully derived, immutable scenario.
struct Scenario {
  std::string preset;
  SystemConfig sys;
  std::vector<CommUserParams> users;
  std::vector<RadarTargetParams> targets;
  DrolConfig drol;
  SolverOptions solver;
  ExperimentConfig experiment;
  ScenarioSpec spec;

  int K() const { return static_cast<int>(users.size()); }
  int Q() const { return static_cast<int>(targets.size()); }
  int frames() const { return experiment.frames > 0 ? experiment.frames : sys.N; }
};

/// Path-loss gain (linear) for a distance in meters.
double path_loss_gain(double distance);

/// Process-noise diagonal for a target noise scale and frame duration.
Vec3 state_noise_diag(double rho_tilde, double frame_time);

/// Initial sensing gain used for the prior bound.
double initial_sensing_gain(const SystemConfig& cfg, int Q);

ScenarioSpec preset_spec(const std::string& preset);
Scenario build_scenario(const ScenarioSpec& spec);
Scenario make_scenario(const std::string& preset);

/// Reads a JSON scenario: a base preset plus overrides.
Scenario load_scenario(const std::string& path);
ScenarioSpec spec_from_json_text(const std::string& text);
std::string spec_to_json_text(const ScenarioSpec& spec);

}  // namespace isac

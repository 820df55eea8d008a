// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "isac/baselines.hpp"
#include "isac/drol.hpp"
#include "isac/scenario.hpp"
#include "isac/world.hpp"

namespace isac {

inline constexpr const char* kCsvSchema = "isac-frames/1";
inline constexpr const char* kCodeVersion = "isac-sim 1.0.0";

struct RunManifest {
  ScenarioSpec spec;
  std::uint64_t seed = 1;
  std::vector<std::string> policies{"drol"};
  int frames = 0;  // 0 means the scenario default
  std::string output_dir;  // empty: nothing written
  bool timing = false;  // adds wall_ms to the CSV (breaks byte-identity)
  bool solver_trace = false;
};

std::string manifest_to_json_text(const RunManifest& m);

std::string csv_header(bool timing);
std::string csv_row(const FrameRecord& r, bool timing);
void write_csv(const std::string& path, const std::vector<FrameRecord>& rows, bool timing);
std::vector<FrameRecord> read_csv(const std::string& path);

/// Trailing mean; the first window-1 entries average the available prefix.
std::vector<double> moving_average(const std::vector<double>& series, int window);
/// Trailing-window mean of a 0/1 series.
std::vector<double> estimation_frequency(const std::vector<int>& bits, int window = 50);
/// Pointwise U/U_reference, then moving-averaged.
std::vector<double> relative_utility_ratio(const std::vector<FrameRecord>& policy,
                                           const std::vector<FrameRecord>& reference,
                                           int window);

/// Decision series of one entity: user k (radar=false) or target k (radar=true).
std::vector<int> decision_series(const std::vector<FrameRecord>& rows, int index, bool radar);

struct ExperimentResult {
  std::map<std::string, std::vector<FrameRecord>> records;
  std::vector<std::string> order;
};

using ProgressFn = std::function<void(int frame, int total)>;

/// Frame-major run of every policy; the learner's world is copied into the others at resync points.
ExperimentResult run_experiment(const Scenario& sc, const RunManifest& m,
                                const ProgressFn& progress = {});

/// Writes CSV and manifest files for a finished run.
void write_outputs(const ExperimentResult& res, const RunManifest& m);

/// Output directory after applying the ISAC_OUTPUT_DIR override.
std::string resolve_output_dir(const std::string& requested);

/// Derived series for one CSV: moving averages, estimation frequencies and optional ratio.
void analyze_csv(const std::string& input, int window, const std::string& reference,
                 const std::string& output);

}  // namespace isac

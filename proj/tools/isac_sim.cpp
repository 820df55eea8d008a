// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "isac/acceptance.hpp"
#include "isac/beamforming.hpp"
#include "isac/harness.hpp"
#include "isac/scenario.hpp"

namespace {

std::vector<std::string> split_policies(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_run(const std::string& config, const std::string& preset, std::uint64_t seed, int frames,
            const std::string& policies, const std::string& output_dir, bool trace,
            bool no_practical, bool timing, bool quiet) {
  isac::ScenarioSpec spec = config.empty() ? isac::preset_spec(preset)
                                           : isac::load_scenario(config).spec;
  if (no_practical) spec.experiment.practical = false;
  if (frames > 0) spec.experiment.frames = frames;
  const isac::Scenario sc = isac::build_scenario(spec);

  isac::RunManifest m;
  m.spec = spec;
  m.seed = seed;
  m.policies = split_policies(policies);
  m.frames = sc.frames();
  m.output_dir = isac::resolve_output_dir(output_dir);
  m.timing = timing;
  m.solver_trace = trace;

  std::ofstream trace_file;
  if (trace) {
    std::filesystem::create_directories(m.output_dir);
    trace_file.open(std::filesystem::path(m.output_dir) / "solver_trace.csv");
    isac::set_solver_trace_sink(&trace_file);
  }
  const isac::ProgressFn progress = [&](int n, int total) {
    if (!quiet && (n % 100 == 0 || n == total))
      std::fprintf(stderr, "\rframe %d/%d", n, total);
  };
  const isac::ExperimentResult res = isac::run_experiment(sc, m, progress);
  if (!quiet) std::fprintf(stderr, "\n");
  isac::set_solver_trace_sink(nullptr);
  isac::write_outputs(res, m);
  for (const auto& name : res.order) {
    const auto& rows = res.records.at(name);
    double mean = 0;
    for (const auto& r : rows) mean += r.U_genie / rows.size();
    std::printf("%-16s frames=%zu mean_U_genie=%.6g\n", name.c_str(), rows.size(), mean);
  }
  std::printf("outputs in %s\n", m.output_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MISO ISAC intermittent estimation simulator"};
  app.require_subcommand(1);

  std::string config, preset = "desk", policies = "drol", output_dir = "out";
  std::uint64_t seed = 1;
  int frames = 0;
  bool trace = false, no_practical = false, timing = false, quiet = false;
  auto* run = app.add_subcommand("run", "Run an experiment and write per-policy CSVs");
  run->add_option("--config", config, "JSON scenario file");
  run->add_option("--preset", preset, "Base preset: desk or paper");
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--frames", frames, "Override the frame count");
  run->add_option("--policies", policies,
                  "Comma list of drol, exhaustive, random, all (suffix -mrt for matched filtering)");
  run->add_option("--output-dir", output_dir, "Output directory (ISAC_OUTPUT_DIR overrides)");
  run->add_flag("--solver-trace", trace, "Write solver_trace.csv");
  run->add_flag("--no-practical", no_practical, "Skip the practical-decision solve");
  run->add_flag("--timing", timing, "Add a wall_ms column");
  run->add_flag("--quiet", quiet, "No progress output");

  std::string suite = "fast";
  auto* accept = app.add_subcommand("accept", "Run an acceptance suite (fast, learning, all, or 1-14)");
  accept->add_option("--suite", suite, "Suite name");

  std::string input, reference, output;
  int window = 150;
  auto* analyze = app.add_subcommand("analyze", "Derived series from a frames CSV");
  analyze->add_option("--input", input, "Frames CSV")->required();
  analyze->add_option("--window", window, "Moving-average window");
  analyze->add_option("--reference", reference, "Reference CSV for the utility ratio");
  analyze->add_option("--output", output, "Output CSV (default: <input>.derived.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run)
      return cmd_run(config, preset, seed, frames, policies, output_dir, trace, no_practical, timing,
                     quiet);
    if (*accept) {
      const bool ok = isac::run_suite(suite, [](const isac::CriterionResult& r) {
        std::printf("%s\n", isac::format_result(r).c_str());
        std::fflush(stdout);
      });
      return ok ? 0 : 1;
    }
    if (*analyze) {
      if (output.empty()) output = input + ".derived.csv";
      isac::analyze_csv(input, window, reference, output);
      std::printf("wrote %s\n", output.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

// SPDX-License-Identifier: Apache-2.0
#include "isac/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"

namespace isac {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

}  // namespace

std::string manifest_to_json_text(const RunManifest& m) {
  nlohmann::json j;
  j["code_version"] = kCodeVersion;
  j["csv_schema"] = kCsvSchema;
  j["seed"] = m.seed;
  j["preset"] = m.spec.preset;
  j["policies"] = m.policies;
  j["frames"] = m.frames;
  j["timing"] = m.timing;
  j["config"] = nlohmann::json::parse(spec_to_json_text(m.spec));
  return j.dump(2) + "\n";
}

std::string csv_header(bool timing) {
  std::string h =
      "frame,U_genie,U_practical,comm_sum,radar_sum,a_c,a_r,K_c,K_r,I_c,I_r,loss,M1,solver_iters";
  if (timing) h += ",wall_ms";
  return h;
}

std::string csv_row(const FrameRecord& r, bool timing) {
  std::string s = std::to_string(r.frame) + "," + fmt(r.U_genie) + "," + fmt(r.U_practical) + "," +
                  fmt(r.comm_sum) + "," + fmt(r.radar_sum) + "," + bits_to_string(r.a_c) + "," +
                  bits_to_string(r.a_r) + "," + std::to_string(r.K_c) + "," +
                  std::to_string(r.K_r) + "," + std::to_string(r.I_c) + "," +
                  std::to_string(r.I_r) + "," + fmt(r.loss) + "," + std::to_string(r.M1) + "," +
                  std::to_string(r.solver_iters);
  if (timing) s += "," + fmt(r.wall_ms);
  return s;
}

void write_csv(const std::string& path, const std::vector<FrameRecord>& rows, bool timing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << csv_header(timing) << '\n';
  for (const auto& r : rows) out << csv_row(r, timing) << '\n';
  if (!out) throw Error("write failed: " + path);
}

std::vector<FrameRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV: " + path);
  const auto header = split(line, ',');
  const bool timing = header.size() == 15;
  if (line != csv_header(timing)) throw Error("unexpected CSV header in " + path);
  std::vector<FrameRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) throw Error("malformed CSV row in " + path);
    FrameRecord r;
    r.frame = std::stoi(f[0]);
    r.U_genie = parse_double(f[1]);
    r.U_practical = parse_double(f[2]);
    r.comm_sum = parse_double(f[3]);
    r.radar_sum = parse_double(f[4]);
    r.a_c = bits_from_string(f[5]);
    r.a_r = bits_from_string(f[6]);
    r.K_c = std::stoi(f[7]);
    r.K_r = std::stoi(f[8]);
    r.I_c = std::stoi(f[9]);
    r.I_r = std::stoi(f[10]);
    r.loss = parse_double(f[11]);
    r.M1 = std::stoi(f[12]);
    r.solver_iters = std::stoi(f[13]);
    if (timing) r.wall_ms = parse_double(f[14]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<double> moving_average(const std::vector<double>& series, int window) {
  if (window < 1) throw ContractViolation("window must be >= 1");
  if (series.empty()) throw ContractViolation("empty series");
  std::vector<double> out(series.size());
  double sum = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    sum += series[i];
    if (i >= static_cast<std::size_t>(window)) sum -= series[i - window];
    const std::size_t n = std::min<std::size_t>(i + 1, window);
    out[i] = sum / double(n);
  }
  return out;
}

std::vector<double> estimation_frequency(const std::vector<int>& bits, int window) {
  std::vector<double> s(bits.begin(), bits.end());
  return moving_average(s, window);
}

std::vector<double> relative_utility_ratio(const std::vector<FrameRecord>& policy,
                                           const std::vector<FrameRecord>& reference,
                                           int window) {
  if (policy.size() != reference.size()) throw ContractViolation("misaligned series");
  std::vector<double> r(policy.size());
  for (std::size_t i = 0; i < policy.size(); ++i) {
    if (policy[i].frame != reference[i].frame) throw ContractViolation("misaligned frame indices");
    r[i] = policy[i].U_genie / reference[i].U_genie;
  }
  return moving_average(r, window);
}

std::vector<int> decision_series(const std::vector<FrameRecord>& rows, int index, bool radar) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back((radar ? r.a_r : r.a_c).at(index));
  return out;
}

std::string resolve_output_dir(const std::string& requested) {
  if (const char* env = std::getenv("ISAC_OUTPUT_DIR"); env && *env) return env;
  return requested;
}

namespace {

struct PolicyRun {
  PolicySpec spec;
  World world;
  std::unique_ptr<DrolState> drol;
  Rng random;
  std::vector<FrameRecord> rows;
};

}  // namespace

ExperimentResult run_experiment(const Scenario& sc, const RunManifest& m,
                                const ProgressFn& progress) {
  const int frames = m.frames > 0 ? m.frames : sc.frames();
  std::vector<PolicyRun> runs;
  int learner = -1;
  for (const auto& name : m.policies) {
    PolicyRun r;
    r.spec = parse_policy(name);
    r.world = make_world(sc, m.seed);
    r.random = RngStreams(m.seed).get(Stream::RandomBaseline);
    if (r.spec.policy == Policy::Drol) {
      if (learner >= 0) throw ConfigError("only one learner per experiment");
      r.drol = std::make_unique<DrolState>(make_drol_state(sc, m.seed));
      learner = static_cast<int>(runs.size());
    }
    runs.push_back(std::move(r));
  }
  const int resync = sc.experiment.resync_interval;

  for (int n = 1; n <= frames; ++n) {
    bool resynced = false;
    if (learner >= 0 && resync > 0 && (n - 1) % resync == 0) {
      for (std::size_t i = 0; i < runs.size(); ++i)
        if (static_cast<int>(i) != learner) runs[i].world = runs[learner].world;
      resynced = true;
    }
    std::unique_ptr<FrameContext> shared;
    if (learner >= 0) {
      PolicyRun& r = runs[learner];
      auto t0 = std::chrono::steady_clock::now();
      shared = std::make_unique<FrameContext>(prepare_frame(sc, r.world));
      FrameRecord rec = run_drol_frame(sc, r.world, *r.drol, *shared,
                                       {r.spec.bf, sc.experiment.practical});
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      r.rows.push_back(std::move(rec));
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (static_cast<int>(i) == learner) continue;
      PolicyRun& r = runs[i];
      auto t0 = std::chrono::steady_clock::now();
      // After a resync every world matches the learner's pre-frame state, so its context (and solve cache) is reusable.
      FrameContext own;
      FrameContext& ctx = (resynced && shared) ? *shared : (own = prepare_frame(sc, r.world));
      FrameRecord rec = run_baseline_frame(r.spec, sc, r.world, ctx, r.random);
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      r.rows.push_back(std::move(rec));
    }
    if (progress) progress(n, frames);
  }

  ExperimentResult res;
  for (auto& r : runs) {
    res.order.push_back(r.spec.name());
    res.records[r.spec.name()] = std::move(r.rows);
  }
  return res;
}

void write_outputs(const ExperimentResult& res, const RunManifest& m) {
  const std::string dir = resolve_output_dir(m.output_dir);
  if (dir.empty()) return;
  fs::create_directories(dir);
  for (const auto& name : res.order)
    write_csv((fs::path(dir) / (name + ".csv")).string(), res.records.at(name), m.timing);
  std::ofstream man(fs::path(dir) / "manifest.json", std::ios::binary);
  man << manifest_to_json_text(m);
}

void analyze_csv(const std::string& input, int window, const std::string& reference,
                 const std::string& output) {
  const auto rows = read_csv(input);
  if (rows.empty()) throw Error("no rows in " + input);
  std::vector<double> u, up;
  for (const auto& r : rows) {
    u.push_back(r.U_genie);
    up.push_back(r.U_practical);
  }
  const auto u_ma = moving_average(u, window);
  const auto up_ma = moving_average(up, window);
  const int K = static_cast<int>(rows[0].a_c.size());
  const int Q = static_cast<int>(rows[0].a_r.size());
  std::vector<std::vector<double>> freq;
  std::string header = "frame,U_genie_ma,U_practical_ma";
  for (int k = 0; k < K; ++k) {
    freq.push_back(estimation_frequency(decision_series(rows, k, false), window));
    header += ",freq_user" + std::to_string(k + 1);
  }
  for (int q = 0; q < Q; ++q) {
    freq.push_back(estimation_frequency(decision_series(rows, q, true), window));
    header += ",freq_target" + std::to_string(q + 1);
  }
  std::vector<double> ratio;
  if (!reference.empty()) {
    ratio = relative_utility_ratio(rows, read_csv(reference), window);
    header += ",utility_ratio";
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw Error("cannot write " + output);
  out << header << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i].frame << ',' << fmt(u_ma[i]) << ',' << fmt(up_ma[i]);
    for (const auto& f : freq) out << ',' << fmt(f[i]);
    if (!ratio.empty()) out << ',' << fmt(ratio[i]);
    out << '\n';
  }
}

}  // namespace isac

// SPDX-License-Identifier: Apache-2.0
#include "isac/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace isac {

using nlohmann::json;

double path_loss_gain(double distance) {
  if (!(distance > 0)) throw ConfigError("user distance must be positive");
  return db_to_linear(-(74.2 + 16.11 * std::log10(distance)));
}

Vec3 state_noise_diag(double rho_tilde, double frame_time) {
  const double eps_v = 0.5 * rho_tilde * frame_time;
  return {1e-4 * rho_tilde * frame_time, 0.5 * rho_tilde * eps_v, eps_v};
}

double initial_sensing_gain(const SystemConfig& cfg, int Q) {
  return cfg.P / (2.0 * (cfg.L_T + cfg.L_R) * (Q + cfg.N));
}

ScenarioSpec preset_spec(const std::string& preset) {
  constexpr double pi = std::numbers::pi;
  ScenarioSpec s;
  s.preset = preset;
  if (preset == "paper") {
    for (double rho : {0.99, 0.96, 0.93, 0.9, 0.85, 0.8}) s.users.push_back({rho, 4000.0});
    s.targets = {{Vec3(pi / 4, 150, 30), 0.05}, {Vec3(pi / 3, 150, 30), 1.0},
                 {Vec3(3 * pi / 4, 150, 30), 5.0}};
    s.drol.hidden = {1024, 1024, 258, 64};
  } else if (preset == "desk") {
    s.sys.L_T = 8;
    s.sys.L_R = 8;
    s.sys.N = 3000;
    s.sys.D = 120;
    for (double rho : {0.99, 0.9, 0.8}) s.users.push_back({rho, 1000.0});
    s.targets = {{Vec3(pi / 4, 150, 30), 0.05}, {Vec3(-pi / 6, 150, 30), 5.0}};
    for (auto& t : s.targets) t.w_r = 1.0;
    s.drol.hidden = {128, 64};
  } else {
    throw ConfigError("unknown preset: " + preset);
  }
  return s;
}

Scenario build_scenario(const ScenarioSpec& spec) {
  Scenario sc;
  sc.preset = spec.preset;
  sc.spec = spec;
  sc.sys = spec.sys;
  sc.drol = spec.drol;
  sc.solver = spec.solver;
  sc.experiment = spec.experiment;
  if (spec.users.empty()) throw ConfigError("scenario needs at least one user");

  SystemConfig& sys = sc.sys;
  sys.w_c.clear();
  sys.w_r.clear();
  for (const auto& u : spec.users) sys.w_c.push_back(u.w_c);
  for (const auto& t : spec.targets) sys.w_r.push_back(t.w_r);
  sys.validate();

  for (const auto& u : spec.users) {
    CommUserParams p;
    p.rho = u.rho;
    p.distance = u.distance;
    p.beta_bar = path_loss_gain(u.distance);
    p.P_u = u.P_u;
    p.sigma_k = sys.sigma_user();
    p.delta_ul = sys.delta_uplink();
    p.varsigma_0 = u.varsigma_ratio * p.beta_bar;
    p.validate();
    sc.users.push_back(p);
  }

  const double gamma0 = initial_sensing_gain(sys, static_cast<int>(spec.targets.size()));
  for (const auto& t : spec.targets) {
    RadarTargetParams p;
    p.x0 = t.x0;
    p.rho_tilde = t.rho_tilde;
    p.theta_bar = t.x0(kTheta) + t.heading_offset;
    p.sigma_eps = state_noise_diag(t.rho_tilde, sys.frame_time());
    p.sigma_rcs = t.sigma_rcs;
    const CrbCoefficients a = crb_coefficients(t.x0, sys, t.sigma_rcs, p.theta_bar, sys.M);
    p.M0 = a.sigma_delta() / gamma0;
    p.validate();
    sc.targets.push_back(p);
  }
  sc.drol.validate();
  sc.solver.validate();
  return sc;
}

Scenario make_scenario(const std::string& preset) { return build_scenario(preset_spec(preset)); }

namespace {

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void apply_system(const json& j, SystemConfig& s) {
  take(j, "c0", s.c0);
  take(j, "fc", s.fc);
  take(j, "B", s.B);
  take(j, "delta_f", s.delta_f);
  take(j, "T_o", s.T_o);
  take(j, "T_cp", s.T_cp);
  take(j, "T", s.T);
  take(j, "M", s.M);
  take(j, "N", s.N);
  take(j, "L_T", s.L_T);
  take(j, "L_R", s.L_R);
  take(j, "P", s.P);
  take(j, "noise_psd_bs", s.noise_psd_bs);
  take(j, "noise_psd_user", s.noise_psd_user);
  take(j, "D", s.D);
  take(j, "omega_bar", s.omega_bar);
  if (j.contains("omega")) {
    const Vec3 w = vec3_from(j.at("omega"));
    s.omega = {w(0), w(1), w(2)};
  }
  take(j, "xi_a", s.xi_a);
  take(j, "xi_b", s.xi_b);
  take(j, "xi_c", s.xi_c);
  take(j, "delta_s", s.delta_s);
}

json system_to_json(const SystemConfig& s) {
  return json{{"c0", s.c0}, {"fc", s.fc}, {"B", s.B}, {"delta_f", s.delta_f},
              {"T_o", s.T_o}, {"T_cp", s.T_cp}, {"T", s.T}, {"M", s.M}, {"N", s.N},
              {"L_T", s.L_T}, {"L_R", s.L_R}, {"P", s.P}, {"noise_psd_bs", s.noise_psd_bs},
              {"noise_psd_user", s.noise_psd_user}, {"D", s.D}, {"omega_bar", s.omega_bar},
              {"omega", {s.omega[0], s.omega[1], s.omega[2]}}, {"xi_a", s.xi_a},
              {"xi_b", s.xi_b}, {"xi_c", s.xi_c}, {"delta_s", s.delta_s}};
}

}  // namespace

ScenarioSpec spec_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid scenario JSON: ") + e.what());
  }
  try {
    ScenarioSpec s = preset_spec(j.value("preset", std::string("desk")));
    if (j.contains("system")) apply_system(j.at("system"), s.sys);
    if (j.contains("users")) {
      s.users.clear();
      for (const auto& u : j.at("users")) {
        UserSpec us;
        take(u, "rho", us.rho);
        take(u, "distance", us.distance);
        take(u, "P_u", us.P_u);
        take(u, "varsigma_ratio", us.varsigma_ratio);
        take(u, "w_c", us.w_c);
        s.users.push_back(us);
      }
    }
    if (j.contains("targets")) {
      s.targets.clear();
      for (const auto& t : j.at("targets")) {
        TargetSpec ts;
        if (t.contains("x0")) ts.x0 = vec3_from(t.at("x0"));
        take(t, "rho_tilde", ts.rho_tilde);
        take(t, "heading_offset", ts.heading_offset);
        take(t, "sigma_rcs", ts.sigma_rcs);
        take(t, "w_r", ts.w_r);
        s.targets.push_back(ts);
      }
    }
    if (j.contains("drol")) {
      const json& d = j.at("drol");
      take(d, "hidden", s.drol.hidden);
      take(d, "leaky_slope", s.drol.leaky_slope);
      take(d, "learning_rate", s.drol.learning_rate);
      take(d, "batch_size", s.drol.batch_size);
      take(d, "memory_capacity", s.drol.memory_capacity);
      take(d, "refine_interval_c", s.drol.refine_interval_c);
      take(d, "refine_interval_r", s.drol.refine_interval_r);
      take(d, "A_c", s.drol.A_c);
      take(d, "A_r", s.drol.A_r);
      take(d, "K_tilde_c0", s.drol.K_tilde_c0);
      take(d, "K_tilde_r0", s.drol.K_tilde_r0);
      if (d.contains("refine_mod_basis"))
        s.drol.refine_basis = refine_basis_from_string(d.at("refine_mod_basis").get<std::string>());
    }
    if (j.contains("solver")) {
      const json& o = j.at("solver");
      take(o, "max_outer_iters", s.solver.max_outer_iters);
      take(o, "tol", s.solver.tol);
      take(o, "mu_tol", s.solver.mu_tol);
      take(o, "lambda_tol", s.solver.lambda_tol);
      take(o, "eta0", s.solver.eta0);
      if (o.contains("w_update_mode"))
        s.solver.mode = w_update_mode_from_string(o.at("w_update_mode").get<std::string>());
    }
    if (j.contains("experiment")) {
      const json& e = j.at("experiment");
      take(e, "frames", s.experiment.frames);
      take(e, "resync_interval", s.experiment.resync_interval);
      take(e, "practical", s.experiment.practical);
      take(e, "gain_at_true_angle", s.experiment.gain_at_true_angle);
    }
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad scenario field: ") + e.what());
  }
}

std::string spec_to_json_text(const ScenarioSpec& s) {
  json j;
  j["preset"] = s.preset;
  j["system"] = system_to_json(s.sys);
  j["users"] = json::array();
  for (const auto& u : s.users)
    j["users"].push_back({{"rho", u.rho}, {"distance", u.distance}, {"P_u", u.P_u},
                          {"varsigma_ratio", u.varsigma_ratio}, {"w_c", u.w_c}});
  j["targets"] = json::array();
  for (const auto& t : s.targets)
    j["targets"].push_back({{"x0", {t.x0(0), t.x0(1), t.x0(2)}}, {"rho_tilde", t.rho_tilde},
                            {"heading_offset", t.heading_offset}, {"sigma_rcs", t.sigma_rcs},
                            {"w_r", t.w_r}});
  j["drol"] = {{"hidden", s.drol.hidden}, {"leaky_slope", s.drol.leaky_slope},
               {"learning_rate", s.drol.learning_rate}, {"batch_size", s.drol.batch_size},
               {"memory_capacity", s.drol.memory_capacity},
               {"refine_interval_c", s.drol.refine_interval_c},
               {"refine_interval_r", s.drol.refine_interval_r}, {"A_c", s.drol.A_c},
               {"A_r", s.drol.A_r}, {"K_tilde_c0", s.drol.K_tilde_c0},
               {"K_tilde_r0", s.drol.K_tilde_r0},
               {"refine_mod_basis", to_string(s.drol.refine_basis)}};
  j["solver"] = {{"max_outer_iters", s.solver.max_outer_iters}, {"tol", s.solver.tol},
                 {"mu_tol", s.solver.mu_tol}, {"lambda_tol", s.solver.lambda_tol},
                 {"eta0", s.solver.eta0}, {"w_update_mode", to_string(s.solver.mode)}};
  j["experiment"] = {{"frames", s.experiment.frames},
                     {"resync_interval", s.experiment.resync_interval},
                     {"practical", s.experiment.practical},
                     {"gain_at_true_angle", s.experiment.gain_at_true_angle}};
  return j.dump(2);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  ScenarioSpec spec = spec_from_json_text(ss.str());
  return build_scenario(spec);
}

}  // namespace isac

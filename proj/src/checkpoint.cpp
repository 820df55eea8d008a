// SPDX-License-Identifier: Apache-2.0
#include "isac/checkpoint.hpp"

#include <fstream>
#include <iterator>

#include "json.hpp"

namespace isac {

using nlohmann::json;

namespace {

template <typename D>
json real_matrix(const Eigen::MatrixBase<D>& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()},
          {"data", std::vector<double>(m.derived().data(), m.derived().data() + m.size())}};
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto data = j.at("data").get<std::vector<double>>();
  Eigen::MatrixXd m(j.at("rows").get<int>(), j.at("cols").get<int>());
  if (static_cast<std::size_t>(m.size()) != data.size()) throw Error("corrupt checkpoint matrix");
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

json complex_vector(const CVec& v) {
  std::vector<double> d;
  for (int i = 0; i < v.size(); ++i) {
    d.push_back(v(i).real());
    d.push_back(v(i).imag());
  }
  return d;
}

CVec cvec_from(const json& j) {
  const auto d = j.get<std::vector<double>>();
  CVec v(d.size() / 2);
  for (int i = 0; i < v.size(); ++i) v(i) = {d[2 * i], d[2 * i + 1]};
  return v;
}

template <typename Vec>
json vec_list(const std::vector<Vec>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(real_matrix(v));
  return a;
}

json world_json(const World& w) {
  json j;
  j["frame"] = w.frame;
  j["users"] = json::array();
  for (const auto& u : w.users)
    j["users"].push_back({{"g_true", complex_vector(u.g_true)},
                          {"g_hat", complex_vector(u.g_hat)},
                          {"varsigma", u.varsigma}});
  j["targets"] = json::array();
  for (std::size_t q = 0; q < w.tracks.size(); ++q)
    j["targets"].push_back({{"x_true", real_matrix(w.x_true[q])},
                            {"x_hat", real_matrix(w.tracks[q].x_hat)},
                            {"M", real_matrix(w.tracks[q].M)}});
  j["rng"] = {w.channel.save(), w.estimation.save(), w.state.save(), w.measurement.save()};
  return j;
}

void world_from(const json& j, World& w) {
  w.frame = j.at("frame").get<int>();
  w.users.clear();
  for (const auto& u : j.at("users"))
    w.users.push_back({cvec_from(u.at("g_true")), cvec_from(u.at("g_hat")),
                       u.at("varsigma").get<double>()});
  w.x_true.clear();
  w.tracks.clear();
  for (const auto& t : j.at("targets")) {
    w.x_true.push_back(matrix_from(t.at("x_true")));
    w.tracks.push_back({matrix_from(t.at("x_hat")), matrix_from(t.at("M"))});
  }
  const auto& r = j.at("rng");
  w.channel.restore(r.at(0).get<std::string>());
  w.estimation.restore(r.at(1).get<std::string>());
  w.state.restore(r.at(2).get<std::string>());
  w.measurement.restore(r.at(3).get<std::string>());
}

json drol_json(const DrolState& s) {
  json j;
  j["mlp"] = {{"slope", s.mlp.slope}, {"weights", vec_list(s.mlp.weights)},
              {"biases", vec_list(s.mlp.biases)}};
  j["adam"] = {{"lr", s.adam.lr}, {"beta1", s.adam.beta1}, {"beta2", s.adam.beta2},
               {"eps", s.adam.eps}, {"t", s.adam.t}, {"mW", vec_list(s.adam.mW)},
               {"vW", vec_list(s.adam.vW)}, {"mb", vec_list(s.adam.mb)},
               {"vb", vec_list(s.adam.vb)}};
  json mem = json::array();
  for (const auto& r : s.memory.data())
    mem.push_back({{"feature", real_matrix(r.feature)}, {"target", r.target}});
  j["memory"] = {{"capacity", s.memory.capacity()}, {"samples", mem}};
  j["norm"] = {{"n", s.norm.n}, {"mean", real_matrix(s.norm.mean)}, {"m2", real_matrix(s.norm.m2)}};
  const ActorParams& a = s.actor;
  j["actor"] = {{"K_tilde_c", a.K_tilde_c}, {"K_tilde_r", a.K_tilde_r}, {"P_c", a.P_c},
                {"P_r", a.P_r}, {"A_c", a.A_c}, {"A_r", a.A_r}, {"Delta_c", a.Delta_c},
                {"Delta_r", a.Delta_r}, {"I_c", a.I_c}, {"I_r", a.I_r},
                {"count_c", a.count_c}, {"count_r", a.count_r}};
  j["rng"] = {s.exploration.save(), s.replay.save()};
  j["force_exhaustive"] = s.force_exhaustive;
  return j;
}

template <typename T>
std::vector<T> list_from(const json& j) {
  std::vector<T> out;
  for (const auto& e : j) out.push_back(matrix_from(e));
  return out;
}

void drol_from(const json& j, DrolState& s) {
  const json& m = j.at("mlp");
  s.mlp.slope = m.at("slope").get<double>();
  s.mlp.weights = list_from<Eigen::MatrixXd>(m.at("weights"));
  s.mlp.biases = list_from<Eigen::VectorXd>(m.at("biases"));
  const json& a = j.at("adam");
  s.adam.lr = a.at("lr").get<double>();
  s.adam.beta1 = a.at("beta1").get<double>();
  s.adam.beta2 = a.at("beta2").get<double>();
  s.adam.eps = a.at("eps").get<double>();
  s.adam.t = a.at("t").get<long long>();
  s.adam.mW = list_from<Eigen::MatrixXd>(a.at("mW"));
  s.adam.vW = list_from<Eigen::MatrixXd>(a.at("vW"));
  s.adam.mb = list_from<Eigen::VectorXd>(a.at("mb"));
  s.adam.vb = list_from<Eigen::VectorXd>(a.at("vb"));
  s.memory = ReplayMemory(j.at("memory").at("capacity").get<int>());
  for (const auto& r : j.at("memory").at("samples"))
    s.memory.push({matrix_from(r.at("feature")), r.at("target").get<Bits>()});
  const json& n = j.at("norm");
  s.norm.n = n.at("n").get<long long>();
  s.norm.mean = matrix_from(n.at("mean"));
  s.norm.m2 = matrix_from(n.at("m2"));
  const json& ac = j.at("actor");
  ActorParams& p = s.actor;
  p.K_tilde_c = ac.at("K_tilde_c").get<int>();
  p.K_tilde_r = ac.at("K_tilde_r").get<int>();
  p.P_c = ac.at("P_c").get<double>();
  p.P_r = ac.at("P_r").get<double>();
  p.A_c = ac.at("A_c").get<double>();
  p.A_r = ac.at("A_r").get<double>();
  p.Delta_c = ac.at("Delta_c").get<int>();
  p.Delta_r = ac.at("Delta_r").get<int>();
  p.I_c = ac.at("I_c").get<std::vector<int>>();
  p.I_r = ac.at("I_r").get<std::vector<int>>();
  p.count_c = ac.at("count_c").get<std::vector<int>>();
  p.count_r = ac.at("count_r").get<std::vector<int>>();
  s.exploration.restore(j.at("rng").at(0).get<std::string>());
  s.replay.restore(j.at("rng").at(1).get<std::string>());
  s.force_exhaustive = j.at("force_exhaustive").get<bool>();
}

}  // namespace

std::vector<std::uint8_t> checkpoint_bytes(const World& w, const DrolState& s) {
  json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["world"] = world_json(w);
  j["learner"] = drol_json(s);
  return json::to_cbor(j);
}

void restore_checkpoint(const std::vector<std::uint8_t>& bytes, World& w, DrolState& s) {
  try {
    const json j = json::from_cbor(bytes);
    if (j.at("format") != kCheckpointFormat) throw Error("not a checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion) throw Error("unsupported checkpoint version");
    world_from(j.at("world"), w);
    drol_from(j.at("learner"), s);
  } catch (const json::exception& e) {
    throw Error(std::string("corrupt checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const World& w, const DrolState& s) {
  const auto bytes = checkpoint_bytes(w, s);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void load_checkpoint(const std::string& path, World& w, DrolState& s) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  restore_checkpoint(bytes, w, s);
}

}  // namespace isac

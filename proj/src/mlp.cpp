// SPDX-License-Identifier: Apache-2.0
#include "isac/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isac {

namespace {

MatrixXd leaky(const MatrixXd& Z, double slope) {
  return Z.unaryExpr([slope](double z) { return z > 0 ? z : slope * z; });
}

MatrixXd leaky_grad(const MatrixXd& Z, double slope) {
  return Z.unaryExpr([slope](double z) { return z > 0 ? 1.0 : slope; });
}

MatrixXd logistic(const MatrixXd& Z) {
  return Z.unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
}

}  // namespace

Mlp Mlp::create(const std::vector<int>& sizes, double slope, Rng& rng) {
  if (sizes.size() < 2) throw ContractViolation("network needs input and output layers");
  Mlp net;
  net.slope = slope;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l], out = sizes[l + 1];
    const double bound = 1.0 / std::sqrt(double(in));
    MatrixXd W(out, in);
    for (int c = 0; c < in; ++c)
      for (int r = 0; r < out; ++r) W(r, c) = bound * (2.0 * rng.uniform() - 1.0);
    VectorXd b(out);
    for (int r = 0; r < out; ++r) b(r) = bound * (2.0 * rng.uniform() - 1.0);
    net.weights.push_back(std::move(W));
    net.biases.push_back(std::move(b));
  }
  return net;
}

std::vector<int> Mlp::sizes() const {
  std::vector<int> s{input_dim()};
  for (const auto& W : weights) s.push_back(static_cast<int>(W.rows()));
  return s;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

MatrixXd Mlp::forward(const MatrixXd& X) const {
  if (X.rows() != input_dim()) throw ContractViolation("input dimension mismatch");
  MatrixXd A = X;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    MatrixXd Z = (weights[l] * A).colwise() + biases[l];
    A = (l + 1 == weights.size()) ? logistic(Z) : leaky(Z, slope);
  }
  return A;
}

VectorXd Mlp::forward(const VectorXd& x) const { return forward(MatrixXd(x)).col(0); }

double bce_loss_and_grad(const Mlp& net, const MatrixXd& X, const MatrixXd& Y, MlpGrads* grads) {
  if (X.cols() == 0 || X.cols() != Y.cols() || Y.rows() != net.output_dim())
    throw ContractViolation("batch shape mismatch");
  const std::size_t L = net.weights.size();
  std::vector<MatrixXd> acts{X};
  std::vector<MatrixXd> pre;
  for (std::size_t l = 0; l < L; ++l) {
    MatrixXd Z = (net.weights[l] * acts.back()).colwise() + net.biases[l];
    acts.push_back(l + 1 == L ? logistic(Z) : leaky(Z, net.slope));
    pre.push_back(std::move(Z));
  }
  const MatrixXd& Pi = acts.back();
  const double n = double(X.cols());
  double loss = 0;
  MatrixXd delta(Pi.rows(), Pi.cols());
  for (int c = 0; c < Pi.cols(); ++c) {
    for (int r = 0; r < Pi.rows(); ++r) {
      const double p = Pi(r, c), y = Y(r, c);
      const double pc = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
      loss -= y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc);
      // Derivative through the logistic output; zero where the clamp is active.
      delta(r, c) = (p == pc) ? (p - y) / n : 0.0;
    }
  }
  loss /= n;
  if (!grads) return loss;

  grads->weights.resize(L);
  grads->biases.resize(L);
  for (std::size_t l = L; l-- > 0;) {
    grads->weights[l] = delta * acts[l].transpose();
    grads->biases[l] = delta.rowwise().sum();
    if (l > 0)
      delta = (net.weights[l].transpose() * delta).cwiseProduct(leaky_grad(pre[l - 1], net.slope));
  }
  return loss;
}

Adam Adam::create(const Mlp& net, double lr) {
  Adam a;
  a.lr = lr;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    a.mW.push_back(MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    a.vW.push_back(MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    a.mb.push_back(VectorXd::Zero(net.biases[l].size()));
    a.vb.push_back(VectorXd::Zero(net.biases[l].size()));
  }
  return a;
}

void Adam::step(Mlp& net, const MlpGrads& g) {
  if (g.weights.size() != net.weights.size()) throw ContractViolation("gradient shape mismatch");
  ++t;
  const double c1 = 1.0 - std::pow(beta1, double(t));
  const double c2 = 1.0 - std::pow(beta2, double(t));
  auto apply = [&](auto& param, auto& m, auto& v, const auto& grad) {
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    apply(net.weights[l], mW[l], vW[l], g.weights[l]);
    apply(net.biases[l], mb[l], vb[l], g.biases[l]);
  }
}

void RunningNormalizer::update(const VectorXd& x) {
  if (mean.size() != x.size()) throw ContractViolation("feature dimension mismatch");
  ++n;
  const VectorXd d = x - mean;
  mean += d / double(n);
  m2 += d.cwiseProduct(x - mean);
}

VectorXd RunningNormalizer::apply(const VectorXd& x) const {
  if (n == 0) return x;
  VectorXd out(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double var = n > 1 ? m2(i) / double(n - 1) : 0.0;
    const double scale = var > 0 ? std::sqrt(var) : std::max(std::abs(mean(i)), 1.0);
    out(i) = (x(i) - mean(i)) / scale;
  }
  return out;
}

MatrixXd RunningNormalizer::apply_columns(const MatrixXd& X) const {
  MatrixXd out(X.rows(), X.cols());
  for (int c = 0; c < X.cols(); ++c) out.col(c) = apply(X.col(c));
  return out;
}

void ReplayMemory::push(ReplaySample s) {
  buf_.push_back(std::move(s));
  while (static_cast<int>(buf_.size()) > capacity_) buf_.pop_front();
}

std::vector<int> ReplayMemory::sample_indices(int batch, Rng& rng) const {
  const int n = size();
  if (n == 0) throw ContractViolation("empty replay memory");
  std::vector<int> idx;
  if (n >= batch) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    // Partial Fisher-Yates with the replay stream.
    for (int i = 0; i < batch; ++i) {
      const int j = i + static_cast<int>(rng.index(n - i));
      std::swap(all[i], all[j]);
    }
    idx.assign(all.begin(), all.begin() + batch);
  } else {
    for (int i = 0; i < batch; ++i) idx.push_back(static_cast<int>(rng.index(n)));
  }
  return idx;
}

}  // namespace isac

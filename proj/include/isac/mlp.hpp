// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <vector>

#include "isac/rng.hpp"
#include "isac/types.hpp"

namespace isac {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Fully connected network: leaky-rectifier hidden layers, logistic output.
struct Mlp {
  std::vector<MatrixXd> weights;  // weights[l] is out x in
  std::vector<VectorXd> biases;
  double slope = 0.3;

  /// `sizes` lists every layer width, input first. Weights are uniform in +-1/sqrt(fan_in).
  static Mlp create(const std::vector<int>& sizes, double slope, Rng& rng);

  int input_dim() const { return static_cast<int>(weights.front().cols()); }
  int output_dim() const { return static_cast<int>(weights.back().rows()); }
  std::vector<int> sizes() const;
  std::size_t parameter_count() const;

  /// Columns of X are samples.
  MatrixXd forward(const MatrixXd& X) const;
  VectorXd forward(const VectorXd& x) const;
};

struct MlpGrads {
  std::vector<MatrixXd> weights;
  std::vector<VectorXd> biases;
};

constexpr double kProbClamp = 1e-7;

/// Binary cross-entropy summed over outputs and averaged over samples.
double bce_loss_and_grad(const Mlp& net, const MatrixXd& X, const MatrixXd& Y, MlpGrads* grads);

struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long long t = 0;
  std::vector<MatrixXd> mW, vW;
  std::vector<VectorXd> mb, vb;

  static Adam create(const Mlp& net, double lr);
  void step(Mlp& net, const MlpGrads& g);
};

/// Per-dimension running mean and variance (Welford).
struct RunningNormalizer {
  long long n = 0;
  VectorXd mean;
  VectorXd m2;

  explicit RunningNormalizer(int dim = 0) : mean(VectorXd::Zero(dim)), m2(VectorXd::Zero(dim)) {}
  void update(const VectorXd& x);
  VectorXd apply(const VectorXd& x) const;
  MatrixXd apply_columns(const MatrixXd& X) const;
};

struct ReplaySample {
  VectorXd feature;  // raw, unnormalized
  Bits target;
};

/// FIFO memory of the most recent samples.
class ReplayMemory {
 public:
  explicit ReplayMemory(int capacity = 500) : capacity_(capacity) {}
  void push(ReplaySample s);
  int size() const { return static_cast<int>(buf_.size()); }
  int capacity() const { return capacity_; }
  const ReplaySample& at(int i) const { return buf_.at(i); }
  const std::deque<ReplaySample>& data() const { return buf_; }
  /// Indices of a training batch: without replacement when enough samples exist.
  std::vector<int> sample_indices(int batch, Rng& rng) const;

 private:
  int capacity_;
  std::deque<ReplaySample> buf_;
};

}  // namespace isac

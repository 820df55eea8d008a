// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>

#include "isac/types.hpp"

namespace isac {

/// Seeded random source with serializable state.
class Rng {
 public:
  Rng() = default;
  explicit Rng(std::seed_seq& seq) : engine_(seq) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Circularly symmetric complex Gaussian with total variance `var`.
  cd complex_normal(double var);
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }

  std::mt19937_64& engine() { return engine_; }

  std::string save() const;
  void restore(const std::string& state);

  bool operator==(const Rng& o) const {
    return engine_ == o.engine_ && normal_ == o.normal_ && uniform_ == o.uniform_;
  }

 private:
  std::mt19937_64 engine_{};
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

enum class Stream : int {
  ChannelEvolution = 0,
  EstimationNoise,
  StateEvolution,
  MeasurementNoise,
  ExplorationNoise,
  DnnInit,
  ReplaySampling,
  RandomBaseline,
  Count
};

const char* stream_name(Stream s);

/// Independent sub-streams derived from one master seed.
class RngStreams {
 public:
  explicit RngStreams(std::uint64_t master_seed);
  Rng& get(Stream s) { return streams_[static_cast<int>(s)]; }
  const Rng& get(Stream s) const { return streams_[static_cast<int>(s)]; }
  std::uint64_t master_seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<Rng, static_cast<int>(Stream::Count)> streams_;
};

}  // namespace isac

// SPDX-License-Identifier: Apache-2.0
#include "isac/rng.hpp"

#include <cmath>
#include <sstream>

namespace isac {

cd Rng::complex_normal(double var) {
  const double s = std::sqrt(var / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

std::size_t Rng::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> d(0, n - 1);
  return d(engine_);
}

std::string Rng::save() const {
  std::ostringstream os;
  os.precision(17);
  os << engine_ << ' ' << normal_ << ' ' << uniform_;
  return os.str();
}

void Rng::restore(const std::string& state) {
  std::istringstream is(state);
  is >> engine_ >> normal_ >> uniform_;
  if (!is) throw Error("corrupt rng state");
}

const char* stream_name(Stream s) {
  switch (s) {
    case Stream::ChannelEvolution: return "channel-evolution";
    case Stream::EstimationNoise: return "estimation-noise";
    case Stream::StateEvolution: return "state-evolution";
    case Stream::MeasurementNoise: return "measurement-noise";
    case Stream::ExplorationNoise: return "exploration-noise";
    case Stream::DnnInit: return "dnn-init";
    case Stream::ReplaySampling: return "replay-sampling";
    case Stream::RandomBaseline: return "random-baseline";
    default: return "unknown";
  }
}

RngStreams::RngStreams(std::uint64_t master_seed) : seed_(master_seed) {
  for (int i = 0; i < static_cast<int>(Stream::Count); ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(0x15ac0000u + i)};
    streams_[i] = Rng(seq);
  }
}

}  // namespace isac

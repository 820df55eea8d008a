// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isac/drol.hpp"
#include "isac/world.hpp"

namespace isac {

inline constexpr const char* kCheckpointFormat = "isac-checkpoint";
inline constexpr int kCheckpointVersion = 1;

/// CBOR-encoded snapshot of the world and learner; doubles are stored exactly.
std::vector<std::uint8_t> checkpoint_bytes(const World& w, const DrolState& s);
void restore_checkpoint(const std::vector<std::uint8_t>& bytes, World& w, DrolState& s);

void save_checkpoint(const std::string& path, const World& w, const DrolState& s);
void load_checkpoint(const std::string& path, World& w, DrolState& s);

}  // namespace isac

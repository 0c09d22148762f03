#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "swarm/nn.hpp"
#include "swarm/tape.hpp"

namespace swarm {

// Binary container: magic, version u32, config text blob, iteration u64,
// then three sections of named little-endian f32 tensors (parameters, Adam
// first moments, Adam second moments) plus named rng states. Loading is
// all-or-nothing: a truncated or corrupt file throws before any state is
// touched.
struct Checkpoint {
  uint32_t version = 1;
  std::string config_text;
  uint64_t iteration = 0;
  std::vector<std::pair<std::string, Tensor>> tensors;
  std::vector<std::pair<std::string, Tensor>> adam_m;
  std::vector<std::pair<std::string, Tensor>> adam_v;
  uint64_t adam_t = 0;
  std::vector<std::pair<std::string, std::array<uint64_t, 4>>> rng_states;
};

void write_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::string& path);

// Copies every named tensor into the parameter set. Any missing, unexpected
// or shape-mismatched name fails with a full diff of the two inventories.
void load_params(ParamSet& params,
                 const std::vector<std::pair<std::string, Tensor>>& tensors);

Checkpoint snapshot(const std::string& config_text, uint64_t iteration, const ParamSet& params,
                    const AdamState& adam);

void restore_adam(AdamState& adam, const Checkpoint& ck);

}  // namespace swarm

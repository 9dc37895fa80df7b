#pragma once

#include <cstdint>
#include <string>

#include "halolab/diffusion_head.hpp"
#include "halolab/flow_head.hpp"
#include "halolab/optim.hpp"

namespace halo {

// Self-describing JSON checkpoints: shape header, flat coefficients, optimizer
// and EMA state, step counter, and the config + seed that produced the run.
// Doubles survive the round trip exactly.

struct NetCheckpoint {
  MlpConfig cfg;
  AdamWConfig adamw;
  Vec params;
  OptimizerState opt;
  EmaParams ema;
  uint64_t seed = 0;
};

void save_net_checkpoint(const std::string& path, const NetCheckpoint& ck);
NetCheckpoint load_net_checkpoint(const std::string& path);

enum class HeadKind { Flow, Diffusion };

// Head checkpoints add a head-type header, the schedule table (diffusion) and
// sampler defaults on top of the backbone state.
void save_flow_head(const std::string& path, const FlowHead& head, uint64_t seed);
FlowHead load_flow_head(const std::string& path, uint64_t* seed_out = nullptr);

void save_diffusion_head(const std::string& path, const DiffusionHead& head, uint64_t seed);
DiffusionHead load_diffusion_head(const std::string& path, uint64_t* seed_out = nullptr);

// Reads only the head-type header.
HeadKind peek_head_kind(const std::string& path);

}  // namespace halo

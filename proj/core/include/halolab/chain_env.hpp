#pragma once

#include <vector>

#include "halolab/rng.hpp"

namespace halo {

// Horizon-barrier rollout abstracted to per-step progress probabilities: a
// rollout succeeds iff all T independent progress draws succeed.
struct ChainEnv {
  std::vector<double> gamma;  // gamma_t in (0,1], t = 1..T

  int horizon() const { return static_cast<int>(gamma.size()); }
  void validate() const;
};

struct ChainRollout {
  bool success = false;
  int failure_step = 0;  // 1-based index of the first failed draw; 0 on success
};

ChainRollout chain_rollout(const ChainEnv& env, Rng& rng);

}  // namespace halo

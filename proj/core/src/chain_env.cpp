#include "halolab/chain_env.hpp"

#include <string>

#include "halolab/errors.hpp"

namespace halo {

void ChainEnv::validate() const {
  if (gamma.empty()) throw ConfigError("ChainEnv: horizon must be >= 1");
  for (size_t t = 0; t < gamma.size(); ++t)
    if (!(gamma[t] > 0.0 && gamma[t] <= 1.0))
      throw ConfigError("ChainEnv: gamma_" + std::to_string(t + 1) + " must lie in (0,1]");
}

ChainRollout chain_rollout(const ChainEnv& env, Rng& rng) {
  ChainRollout r;
  for (int t = 0; t < env.horizon(); ++t) {
    if (rng.uniform() >= env.gamma[t]) {
      r.success = false;
      r.failure_step = t + 1;
      return r;
    }
  }
  r.success = true;
  return r;
}

}  // namespace halo

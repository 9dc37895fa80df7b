#pragma once

#include <cstdint>
#include <vector>

#include "halolab/linalg.hpp"

namespace halo {

struct AdamWConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
  double clip = 1.0;  // global gradient-norm ceiling; <= 0 disables clipping

  bool operator==(const AdamWConfig&) const = default;
};

struct OptimizerState {
  AdamWConfig cfg;
  Vec m;  // first moments
  Vec v;  // second moments
  long step = 0;
};

OptimizerState adamw_init(const AdamWConfig& cfg, size_t n_params);

// One AdamW update: clip the global gradient norm, update bias-corrected
// moments, apply decoupled weight decay. Returns the pre-clip gradient norm.
double adamw_step(OptimizerState& state, Vec& params, const Vec& grads);

struct EmaParams {
  Vec shadow;
  double decay = 0.999;
};

EmaParams ema_init(const Vec& params, double decay);

// shadow <- decay * shadow + (1 - decay) * params, elementwise.
void ema_update(Vec& shadow, const Vec& params, double decay);
inline void ema_update(EmaParams& ema, const Vec& params) {
  ema_update(ema.shadow, params, ema.decay);
}

}  // namespace halo

#pragma once

#include <string>
#include <vector>

#include "halolab/errors.hpp"
#include "halolab/linalg.hpp"

namespace halo {

// Record of one deterministic sampling run: initial latent, every intermediate
// state (step_count + 1 entries), and the returned action (= states.back()).
struct SamplerTrace {
  Vec z;
  std::vector<Vec> states;
  Vec action;
};

// A sampler decomposed into its per-step maps x_{k+1} = F_k(x_k). Both heads
// implement this; the Jacobian-chain diagnostics differentiate each F_k.
class SteppedSampler {
 public:
  virtual ~SteppedSampler() = default;

  virtual int dim() const = 0;
  virtual int step_count() const = 0;
  virtual Vec apply_step(int k, const Vec& x) const = 0;

  Vec sample(const Vec& z) const {
    Vec x = z;
    for (int k = 0; k < step_count(); ++k) {
      x = apply_step(k, x);
      if (!all_finite(x))
        throw NumericalError("sampler: non-finite state after step " + std::to_string(k));
    }
    return x;
  }

  SamplerTrace sample_trace(const Vec& z) const {
    SamplerTrace tr;
    tr.z = z;
    tr.states.reserve(step_count() + 1);
    tr.states.push_back(z);
    for (int k = 0; k < step_count(); ++k) {
      tr.states.push_back(apply_step(k, tr.states.back()));
      if (!all_finite(tr.states.back()))
        throw NumericalError("sampler: non-finite state after step " + std::to_string(k));
    }
    tr.action = tr.states.back();
    return tr;
  }
};

}  // namespace halo

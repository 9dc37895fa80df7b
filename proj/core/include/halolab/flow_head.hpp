#pragma once

#include <cstdint>
#include <vector>

#include "halolab/mlp.hpp"
#include "halolab/optim.hpp"
#include "halolab/sampler_trace.hpp"

namespace halo {

enum class Integrator { Euler, Heun };

struct FlowConfig {
  MlpConfig mlp;
  AdamWConfig adamw;
  int sample_steps = 50;
  Integrator integrator = Integrator::Euler;
  double ema_decay = 0.999;
  bool eval_use_ema = false;  // rectified flow evaluates raw weights by default
};

// Rectified-flow head: velocity field v(x,t) trained on straight-line
// interpolants, sampled by deterministic Euler/Heun integration from t=1 to 0.
class FlowHead : public SteppedSampler {
 public:
  FlowHead(const FlowConfig& cfg, uint64_t init_seed);

  // One optimizer step on a batch of data actions. Draws t ~ U[0,1] and
  // x1 ~ N(0,I) per sample; loss is the mean squared velocity error.
  double train_step(const std::vector<Vec>& batch, Rng& rng);

  // Velocity of the evaluation network (raw or EMA per config).
  Vec velocity(const Vec& x, double t) const;

  int dim() const override { return cfg_.mlp.action_dim; }
  int step_count() const override { return cfg_.sample_steps; }
  Vec apply_step(int k, const Vec& x) const override;

  // Lockstep integration of many latents; per-latent results are identical to
  // sample() bit for bit.
  std::vector<Vec> sample_batch(const std::vector<Vec>& latents) const;

  const FlowConfig& config() const { return cfg_; }
  long steps_trained() const { return opt_.step; }

  // Retargets the sampler without touching the learned field.
  void set_sample_steps(int k);
  void set_integrator(Integrator integ) { cfg_.integrator = integ; }

  MlpParams& net() { return net_; }
  const MlpParams& net() const { return net_; }
  MlpParams& ema_net() { return ema_net_; }
  const MlpParams& ema_net() const { return ema_net_; }
  OptimizerState& opt() { return opt_; }
  const OptimizerState& opt() const { return opt_; }
  const MlpParams& eval_params() const { return cfg_.eval_use_ema ? ema_net_ : net_; }

 private:
  FlowConfig cfg_;
  MlpParams net_;
  MlpParams ema_net_;
  OptimizerState opt_;
  // training scratch, reused across steps (training is single-threaded)
  ForwardCache cache_;
  Vec grad_;
};

}  // namespace halo

#pragma once

#include <cstdint>
#include <vector>

#include "halolab/mlp.hpp"
#include "halolab/optim.hpp"
#include "halolab/sampler_trace.hpp"

namespace halo {

// Improved-DDPM cosine schedule: alpha_bar[t] for t = 0..T, normalized so
// alpha_bar[0] = 1, clipped to [1e-5, 1], strictly decreasing.
Vec cosine_schedule(int t_diff);

struct DiffusionConfig {
  MlpConfig mlp;
  AdamWConfig adamw;
  int t_diff = 200;    // schedule length T
  int ddim_steps = 50;  // sampling step count K, 1 <= K <= T
  double ema_decay = 0.999;
  bool eval_use_ema = true;  // diffusion evaluates the EMA weights by default
};

// v-prediction diffusion head with deterministic DDIM (eta = 0) sampling.
// Timesteps are fed to the backbone as t / T before the sinusoidal embedding.
class DiffusionHead : public SteppedSampler {
 public:
  DiffusionHead(const DiffusionConfig& cfg, uint64_t init_seed);

  // One optimizer + EMA step on a batch of data actions: t ~ Uniform{1..T},
  // eps ~ N(0,I), MSE on the v-target sqrt(ab)*eps - sqrt(1-ab)*x0.
  double train_step(const std::vector<Vec>& batch, Rng& rng);

  // v_theta of the evaluation network at integer timestep t.
  Vec v_predict(const Vec& x, int t) const;

  int dim() const override { return cfg_.mlp.action_dim; }
  int step_count() const override { return cfg_.ddim_steps; }
  Vec apply_step(int k, const Vec& x) const override;

  std::vector<Vec> sample_batch(const std::vector<Vec>& latents) const;

  // Decreasing timestep grid tau_0 = T, ..., tau_K = 0 (K+1 entries).
  const std::vector<int>& timestep_grid() const { return grid_; }
  const Vec& alpha_bar() const { return alpha_bar_; }

  const DiffusionConfig& config() const { return cfg_; }
  long steps_trained() const { return opt_.step; }

  // Retargets the DDIM step count (1 <= K <= T) without touching the network.
  void set_ddim_steps(int k);

  MlpParams& net() { return net_; }
  const MlpParams& net() const { return net_; }
  MlpParams& ema_net() { return ema_net_; }
  const MlpParams& ema_net() const { return ema_net_; }
  OptimizerState& opt() { return opt_; }
  const OptimizerState& opt() const { return opt_; }
  const MlpParams& eval_params() const { return cfg_.eval_use_ema ? ema_net_ : net_; }

 private:
  DiffusionConfig cfg_;
  Vec alpha_bar_;
  std::vector<int> grid_;
  MlpParams net_;
  MlpParams ema_net_;
  OptimizerState opt_;
  ForwardCache cache_;
  Vec grad_;
};

}  // namespace halo

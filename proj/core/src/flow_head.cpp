#include "halolab/flow_head.hpp"

#include <cmath>
#include <string>

#include "halolab/errors.hpp"

namespace halo {

FlowHead::FlowHead(const FlowConfig& cfg, uint64_t init_seed) : cfg_(cfg) {
  if (cfg.sample_steps < 1) throw ConfigError("FlowHead: sample_steps must be >= 1");
  Rng rng(init_seed);
  net_ = mlp_init(cfg.mlp, rng);
  ema_net_ = net_;
  opt_ = adamw_init(cfg.adamw, net_.flat.size());
  grad_.assign(net_.flat.size(), 0.0);
}

double FlowHead::train_step(const std::vector<Vec>& batch, Rng& rng) {
  if (batch.empty()) throw ConfigError("flow train_step: batch must be nonempty");
  const int bsz = static_cast<int>(batch.size());
  const int d = cfg_.mlp.action_dim;

  Mat xt(bsz, d);
  Mat target(bsz, d);
  Vec ts(bsz);
  for (int i = 0; i < bsz; ++i) {
    if (static_cast<int>(batch[i].size()) != d) throw ShapeError("flow train_step: sample dim mismatch");
    const double t = rng.uniform();
    ts[i] = t;
    for (int j = 0; j < d; ++j) {
      const double x0 = batch[i][j];
      const double x1 = rng.normal();
      xt(i, j) = (1.0 - t) * x0 + t * x1;
      target(i, j) = x1 - x0;
    }
  }

  mlp_forward_batch(net_, xt, ts, cache_);

  double loss = 0.0;
  Mat out_grad(bsz, d);
  const double inv_b = 1.0 / bsz;
  for (int i = 0; i < bsz; ++i) {
    for (int j = 0; j < d; ++j) {
      const double r = cache_.y(i, j) - target(i, j);
      loss += r * r;
      out_grad(i, j) = 2.0 * inv_b * r;
    }
  }
  loss *= inv_b;
  if (!std::isfinite(loss))
    throw NumericalError("flow train_step: non-finite loss at step " +
                         std::to_string(opt_.step + 1));

  std::fill(grad_.begin(), grad_.end(), 0.0);
  mlp_backward_batch(net_, cache_, out_grad, grad_);
  adamw_step(opt_, net_.flat, grad_);
  ema_update(ema_net_.flat, net_.flat, cfg_.ema_decay);
  return loss;
}

void FlowHead::set_sample_steps(int k) {
  if (k < 1) throw ConfigError("FlowHead: sample_steps must be >= 1");
  cfg_.sample_steps = k;
}

Vec FlowHead::velocity(const Vec& x, double t) const {
  static thread_local ForwardCache tl_cache;
  return mlp_forward(eval_params(), x, t, tl_cache);
}

Vec FlowHead::apply_step(int k, const Vec& x) const {
  const int steps = cfg_.sample_steps;
  const double dt = 1.0 / steps;
  const double t = 1.0 - k * dt;
  const int d = cfg_.mlp.action_dim;
  Vec out(d);
  if (cfg_.integrator == Integrator::Euler) {
    const Vec v = velocity(x, t);
    for (int j = 0; j < d; ++j) out[j] = x[j] - dt * v[j];
  } else {
    const Vec v1 = velocity(x, t);
    Vec mid(d);
    for (int j = 0; j < d; ++j) mid[j] = x[j] - dt * v1[j];
    const Vec v2 = velocity(mid, t - dt);
    for (int j = 0; j < d; ++j) out[j] = x[j] - 0.5 * dt * (v1[j] + v2[j]);
  }
  return out;
}

std::vector<Vec> FlowHead::sample_batch(const std::vector<Vec>& latents) const {
  const int bsz = static_cast<int>(latents.size());
  const int d = cfg_.mlp.action_dim;
  const int steps = cfg_.sample_steps;
  const double dt = 1.0 / steps;
  const MlpParams& p = eval_params();

  Mat x(bsz, d);
  for (int i = 0; i < bsz; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = latents[i][j];

  ForwardCache cache;
  Mat mid(bsz, d);
  for (int k = 0; k < steps; ++k) {
    const double t = 1.0 - k * dt;
    Vec ts(bsz, t);
    mlp_forward_batch(p, x, ts, cache);
    if (cfg_.integrator == Integrator::Euler) {
      for (int i = 0; i < bsz; ++i)
        for (int j = 0; j < d; ++j) x(i, j) -= dt * cache.y(i, j);
    } else {
      Mat v1 = cache.y;
      for (int i = 0; i < bsz; ++i)
        for (int j = 0; j < d; ++j) mid(i, j) = x(i, j) - dt * v1(i, j);
      Vec ts2(bsz, t - dt);
      mlp_forward_batch(p, mid, ts2, cache);
      for (int i = 0; i < bsz; ++i)
        for (int j = 0; j < d; ++j) x(i, j) -= 0.5 * dt * (v1(i, j) + cache.y(i, j));
    }
  }
  std::vector<Vec> out(bsz);
  for (int i = 0; i < bsz; ++i) out[i] = Vec(x.row(i), x.row(i) + d);
  return out;
}

}  // namespace halo

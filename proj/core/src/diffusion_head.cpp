#include "halolab/diffusion_head.hpp"

#include <cmath>
#include <string>

#include "halolab/errors.hpp"

namespace halo {

Vec cosine_schedule(int t_diff) {
  if (t_diff < 1) throw ConfigError("cosine_schedule: T must be >= 1");
  const double s = 0.008;
  const double pi_half = 1.5707963267948966192313216916398;
  const double denom = std::cos((s / (1.0 + s)) * pi_half);
  const double norm = denom * denom;
  Vec ab(static_cast<size_t>(t_diff) + 1);
  for (int t = 0; t <= t_diff; ++t) {
    const double arg = ((static_cast<double>(t) / t_diff + s) / (1.0 + s)) * pi_half;
    const double c = std::cos(arg);
    double v = (c * c) / norm;
    v = std::min(1.0, std::max(1e-5, v));
    ab[t] = v;
  }
  for (int t = 1; t <= t_diff; ++t)
    if (!(ab[t] < ab[t - 1]))
      throw NumericalError("cosine_schedule: alpha_bar not strictly decreasing at t = " +
                           std::to_string(t));
  return ab;
}

namespace {

std::vector<int> make_grid(int t_diff, int k) {
  // Evenly spaced in t, starting at T and ending at 0.
  std::vector<int> grid(static_cast<size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) {
    const double t = static_cast<double>(t_diff) * (1.0 - static_cast<double>(j) / k);
    grid[j] = static_cast<int>(std::lround(t));
  }
  grid[0] = t_diff;
  grid[k] = 0;
  return grid;
}

}  // namespace

DiffusionHead::DiffusionHead(const DiffusionConfig& cfg, uint64_t init_seed) : cfg_(cfg) {
  if (cfg.t_diff < 1) throw ConfigError("DiffusionHead: t_diff must be >= 1");
  if (cfg.ddim_steps < 1 || cfg.ddim_steps > cfg.t_diff)
    throw ConfigError("DiffusionHead: need 1 <= ddim_steps <= t_diff, got K = " +
                      std::to_string(cfg.ddim_steps) + ", T = " + std::to_string(cfg.t_diff));
  alpha_bar_ = cosine_schedule(cfg.t_diff);
  grid_ = make_grid(cfg.t_diff, cfg.ddim_steps);
  Rng rng(init_seed);
  net_ = mlp_init(cfg.mlp, rng);
  ema_net_ = net_;
  opt_ = adamw_init(cfg.adamw, net_.flat.size());
  grad_.assign(net_.flat.size(), 0.0);
}

void DiffusionHead::set_ddim_steps(int k) {
  if (k < 1 || k > cfg_.t_diff)
    throw ConfigError("DiffusionHead: need 1 <= ddim_steps <= t_diff, got K = " +
                      std::to_string(k));
  cfg_.ddim_steps = k;
  grid_ = make_grid(cfg_.t_diff, k);
}

double DiffusionHead::train_step(const std::vector<Vec>& batch, Rng& rng) {
  if (batch.empty()) throw ConfigError("diffusion train_step: batch must be nonempty");
  const int bsz = static_cast<int>(batch.size());
  const int d = cfg_.mlp.action_dim;
  const int t_diff = cfg_.t_diff;

  Mat xt(bsz, d);
  Mat target(bsz, d);
  Vec ts(bsz);
  for (int i = 0; i < bsz; ++i) {
    if (static_cast<int>(batch[i].size()) != d)
      throw ShapeError("diffusion train_step: sample dim mismatch");
    const int t = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(t_diff)));
    ts[i] = static_cast<double>(t) / t_diff;
    const double ab = alpha_bar_[t];
    const double sa = std::sqrt(ab);
    const double sb = std::sqrt(1.0 - ab);
    for (int j = 0; j < d; ++j) {
      const double x0 = batch[i][j];
      const double eps = rng.normal();
      xt(i, j) = sa * x0 + sb * eps;
      target(i, j) = sa * eps - sb * x0;
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
    throw NumericalError("diffusion train_step: non-finite loss at step " +
                         std::to_string(opt_.step + 1));

  std::fill(grad_.begin(), grad_.end(), 0.0);
  mlp_backward_batch(net_, cache_, out_grad, grad_);
  adamw_step(opt_, net_.flat, grad_);
  ema_update(ema_net_.flat, net_.flat, cfg_.ema_decay);
  return loss;
}

Vec DiffusionHead::v_predict(const Vec& x, int t) const {
  static thread_local ForwardCache tl_cache;
  return mlp_forward(eval_params(), x, static_cast<double>(t) / cfg_.t_diff, tl_cache);
}

Vec DiffusionHead::apply_step(int k, const Vec& x) const {
  const int t = grid_[k];
  const int t_next = grid_[k + 1];
  const double ab = alpha_bar_[t];
  const double abn = alpha_bar_[t_next];
  const double sa = std::sqrt(ab);
  const double sb = std::sqrt(1.0 - ab);
  const double san = std::sqrt(abn);
  const double sbn = std::sqrt(1.0 - abn);
  const Vec v = v_predict(x, t);
  const int d = cfg_.mlp.action_dim;
  Vec out(d);
  for (int j = 0; j < d; ++j) {
    const double x0_hat = sa * x[j] - sb * v[j];
    const double eps_hat = sb * x[j] + sa * v[j];
    out[j] = san * x0_hat + sbn * eps_hat;
  }
  return out;
}

std::vector<Vec> DiffusionHead::sample_batch(const std::vector<Vec>& latents) const {
  const int bsz = static_cast<int>(latents.size());
  const int d = cfg_.mlp.action_dim;
  const MlpParams& p = eval_params();

  Mat x(bsz, d);
  for (int i = 0; i < bsz; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = latents[i][j];

  ForwardCache cache;
  for (int k = 0; k < cfg_.ddim_steps; ++k) {
    const int t = grid_[k];
    const int t_next = grid_[k + 1];
    const double ab = alpha_bar_[t];
    const double abn = alpha_bar_[t_next];
    const double sa = std::sqrt(ab);
    const double sb = std::sqrt(1.0 - ab);
    const double san = std::sqrt(abn);
    const double sbn = std::sqrt(1.0 - abn);
    Vec ts(bsz, static_cast<double>(t) / cfg_.t_diff);
    mlp_forward_batch(p, x, ts, cache);
    for (int i = 0; i < bsz; ++i) {
      for (int j = 0; j < d; ++j) {
        const double v = cache.y(i, j);
        const double x0_hat = sa * x(i, j) - sb * v;
        const double eps_hat = sb * x(i, j) + sa * v;
        x(i, j) = san * x0_hat + sbn * eps_hat;
      }
    }
  }
  std::vector<Vec> out(bsz);
  for (int i = 0; i < bsz; ++i) out[i] = Vec(x.row(i), x.row(i) + d);
  return out;
}

}  // namespace halo

#include "halolab/optim.hpp"

#include <cmath>
#include <string>

#include "halolab/errors.hpp"

namespace halo {

OptimizerState adamw_init(const AdamWConfig& cfg, size_t n_params) {
  if (cfg.lr <= 0.0 || cfg.eps <= 0.0) throw ConfigError("adamw_init: lr and eps must be positive");
  if (cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0)
    throw ConfigError("adamw_init: betas must lie in [0,1)");
  if (cfg.weight_decay < 0.0) throw ConfigError("adamw_init: weight decay must be nonnegative");
  OptimizerState st;
  st.cfg = cfg;
  st.m.assign(n_params, 0.0);
  st.v.assign(n_params, 0.0);
  return st;
}

double adamw_step(OptimizerState& state, Vec& params, const Vec& grads) {
  const size_t n = params.size();
  if (grads.size() != n || state.m.size() != n)
    throw ShapeError("adamw_step: parameter/gradient/moment size mismatch");
  double sq = 0.0;
  for (double g : grads) {
    if (!std::isfinite(g))
      throw NumericalError("adamw_step: non-finite gradient at step " +
                           std::to_string(state.step + 1));
    sq += g * g;
  }
  const double norm = std::sqrt(sq);
  const AdamWConfig& c = state.cfg;
  const double scale = (c.clip > 0.0 && norm > c.clip) ? c.clip / norm : 1.0;

  state.step += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < n; ++i) {
    const double g = grads[i] * scale;
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= c.lr * (mhat / (std::sqrt(vhat) + c.eps) + c.weight_decay * params[i]);
  }
  return norm;
}

EmaParams ema_init(const Vec& params, double decay) {
  if (decay < 0.0 || decay > 1.0) throw ConfigError("ema_init: decay must lie in [0,1]");
  EmaParams e;
  e.shadow = params;
  e.decay = decay;
  return e;
}

void ema_update(Vec& shadow, const Vec& params, double decay) {
  if (shadow.size() != params.size()) throw ShapeError("ema_update: size mismatch");
  if (decay < 0.0 || decay > 1.0) throw ConfigError("ema_update: decay must lie in [0,1]");
  for (size_t i = 0; i < params.size(); ++i)
    shadow[i] = decay * shadow[i] + (1.0 - decay) * params[i];
}

}  // namespace halo

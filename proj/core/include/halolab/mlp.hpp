#pragma once

#include <cstdint>
#include <vector>

#include "halolab/linalg.hpp"
#include "halolab/rng.hpp"

namespace halo {

// Backbone: [a || embed(t)] -> depth x (Linear -> LayerNorm -> SiLU) -> Linear -> R^d.
struct MlpConfig {
  int action_dim = 2;  // network input a-part and output dimension
  int embed_dim = 64;  // sinusoidal time embedding width, must be even
  int hidden = 256;
  int depth = 4;
  double ln_eps = 1e-5;

  int input_dim() const { return action_dim + embed_dim; }
  bool operator==(const MlpConfig&) const = default;
};

// Sinusoidal embedding of a scalar t: dim/2 sines then dim/2 cosines over the
// frequency ladder 10000^(-2i/dim).
Vec sinusoidal_embed(double t, int dim);

// All parameters live in one flat array; the offsets below are the layout.
struct MlpLayout {
  struct Block {
    size_t w, b, gain, bias;  // offsets into the flat array
    int in, out;
  };
  std::vector<Block> blocks;
  size_t w_out = 0, b_out = 0;
  size_t total = 0;
};
MlpLayout mlp_layout(const MlpConfig& cfg);

struct MlpParams {
  MlpConfig cfg;
  MlpLayout layout;
  Vec flat;

  double* w(int l) { return flat.data() + layout.blocks[l].w; }
  const double* w(int l) const { return flat.data() + layout.blocks[l].w; }
};

// Weights ~ U(+-sqrt(1/fan_in)), biases 0, LayerNorm gain 1 / offset 0.
MlpParams mlp_init(const MlpConfig& cfg, Rng& rng);

// Activations retained for the exact backward pass.
struct ForwardCache {
  int batch = 0;
  Mat x0;                    // B x input_dim
  std::vector<Mat> xhat;     // depth of B x hidden, LayerNorm-normalized pre-affine
  std::vector<Vec> inv_std;  // depth of B
  std::vector<Mat> s;        // depth of B x hidden, SiLU inputs
  std::vector<Mat> sig;      // depth of B x hidden, sigmoid(s), reused by backward
  std::vector<Mat> act;      // depth of B x hidden, SiLU outputs
  Mat scratch;               // reused between layers
  Mat wt_scratch;            // transposed weights for the forward kernel
  Mat y;                     // B x action_dim
};

// Batched forward. a_in: B x action_dim, t: B scalars. Throws NumericalError
// on non-finite inputs.
void mlp_forward_batch(const MlpParams& p, const Mat& a_in, const Vec& t, ForwardCache& cache);

// Convenience single-sample forward.
Vec mlp_forward(const MlpParams& p, const Vec& a_in, double t);
Vec mlp_forward(const MlpParams& p, const Vec& a_in, double t, ForwardCache& cache);

// Gradient of loss = sum_b out_grad_b . y_b with respect to every parameter.
// out_grad: B x action_dim matching the cache. grad_flat is accumulated into
// (callers zero it between steps).
void mlp_backward_batch(const MlpParams& p, const ForwardCache& cache, const Mat& out_grad,
                        Vec& grad_flat);

Vec mlp_backward(const MlpParams& p, const ForwardCache& cache, const Vec& out_grad);

}  // namespace halo

#include "halolab/mlp.hpp"

#include <cmath>
#include <string>

#include "halolab/errors.hpp"

namespace halo {

namespace {

// Reshape reusing capacity; contents are fully overwritten by the caller.
void reshape(Mat& m, int rows, int cols) {
  m.rows = rows;
  m.cols = cols;
  m.data.resize(static_cast<size_t>(rows) * cols);
}

}  // namespace

Vec sinusoidal_embed(double t, int dim) {
  if (dim <= 0 || dim % 2 != 0)
    throw ConfigError("sinusoidal_embed: dim must be a positive even integer, got " +
                      std::to_string(dim));
  Vec out(static_cast<size_t>(dim));
  const int half = dim / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::pow(10000.0, -2.0 * i / dim);
    out[i] = std::sin(t * freq);
    out[half + i] = std::cos(t * freq);
  }
  return out;
}

MlpLayout mlp_layout(const MlpConfig& cfg) {
  if (cfg.action_dim < 1 || cfg.hidden < 1 || cfg.depth < 1)
    throw ConfigError("mlp_layout: action_dim, hidden, depth must all be >= 1");
  if (cfg.embed_dim <= 0 || cfg.embed_dim % 2 != 0)
    throw ConfigError("mlp_layout: embed_dim must be a positive even integer");
  MlpLayout lay;
  size_t off = 0;
  int in = cfg.input_dim();
  for (int l = 0; l < cfg.depth; ++l) {
    MlpLayout::Block b;
    b.in = in;
    b.out = cfg.hidden;
    b.w = off;
    off += static_cast<size_t>(b.out) * b.in;
    b.b = off;
    off += b.out;
    b.gain = off;
    off += b.out;
    b.bias = off;
    off += b.out;
    lay.blocks.push_back(b);
    in = cfg.hidden;
  }
  lay.w_out = off;
  off += static_cast<size_t>(cfg.action_dim) * cfg.hidden;
  lay.b_out = off;
  off += cfg.action_dim;
  lay.total = off;
  return lay;
}

MlpParams mlp_init(const MlpConfig& cfg, Rng& rng) {
  MlpParams p;
  p.cfg = cfg;
  p.layout = mlp_layout(cfg);
  p.flat.assign(p.layout.total, 0.0);
  for (const auto& b : p.layout.blocks) {
    const double bound = std::sqrt(1.0 / b.in);
    for (size_t i = 0; i < static_cast<size_t>(b.out) * b.in; ++i)
      p.flat[b.w + i] = rng.uniform(-bound, bound);
    for (int i = 0; i < b.out; ++i) p.flat[b.gain + i] = 1.0;
  }
  const double bound = std::sqrt(1.0 / cfg.hidden);
  for (size_t i = 0; i < static_cast<size_t>(cfg.action_dim) * cfg.hidden; ++i)
    p.flat[p.layout.w_out + i] = rng.uniform(-bound, bound);
  return p;
}

namespace {

// z = x * W^T + b with W stored row-major (out x in). Transposes the weights
// once per call and runs the register-tiled kernel.
void linear_forward(const Mat& x, const double* w, const double* b, int out, Mat& z, Mat& wt) {
  const int in = x.cols;
  reshape(wt, in, out);
  for (int o = 0; o < out; ++o)
    for (int t = 0; t < in; ++t) wt(t, o) = w[static_cast<size_t>(o) * in + t];
  matmul_bias_tiled(x, wt, b, z);
}

}  // namespace

void mlp_forward_batch(const MlpParams& p, const Mat& a_in, const Vec& t, ForwardCache& cache) {
  const MlpConfig& cfg = p.cfg;
  const int bsz = a_in.rows;
  if (a_in.cols != cfg.action_dim || static_cast<int>(t.size()) != bsz)
    throw ShapeError("mlp_forward_batch: input shape mismatch");
  for (double v : a_in.data)
    if (!std::isfinite(v)) throw NumericalError("mlp_forward_batch: non-finite input");

  cache.batch = bsz;
  reshape(cache.x0, bsz, cfg.input_dim());
  const int half = cfg.embed_dim / 2;
  for (int i = 0; i < bsz; ++i) {
    double* row = cache.x0.row(i);
    for (int j = 0; j < cfg.action_dim; ++j) row[j] = a_in(i, j);
    for (int k = 0; k < half; ++k) {
      const double freq = std::pow(10000.0, -2.0 * k / cfg.embed_dim);
      row[cfg.action_dim + k] = std::sin(t[i] * freq);
      row[cfg.action_dim + half + k] = std::cos(t[i] * freq);
    }
  }

  cache.xhat.resize(cfg.depth);
  cache.inv_std.resize(cfg.depth);
  cache.s.resize(cfg.depth);
  cache.sig.resize(cfg.depth);
  cache.act.resize(cfg.depth);

  const Mat* cur = &cache.x0;
  for (int l = 0; l < cfg.depth; ++l) {
    const auto& blk = p.layout.blocks[l];
    Mat& z = cache.scratch;
    linear_forward(*cur, p.flat.data() + blk.w, p.flat.data() + blk.b, blk.out, z,
                   cache.wt_scratch);

    Mat& xhat = cache.xhat[l];
    Mat& s = cache.s[l];
    Mat& sig = cache.sig[l];
    Mat& act = cache.act[l];
    reshape(xhat, bsz, blk.out);
    reshape(s, bsz, blk.out);
    reshape(sig, bsz, blk.out);
    reshape(act, bsz, blk.out);
    cache.inv_std[l].assign(bsz, 0.0);

    const double* gain = p.flat.data() + blk.gain;
    const double* bias = p.flat.data() + blk.bias;
    const int h = blk.out;
    for (int i = 0; i < bsz; ++i) {
      const double* zi = z.row(i);
      double mean = 0.0;
#pragma omp simd reduction(+ : mean)
      for (int j = 0; j < h; ++j) mean += zi[j];
      mean /= h;
      double var = 0.0;
#pragma omp simd reduction(+ : var)
      for (int j = 0; j < h; ++j) {
        const double d = zi[j] - mean;
        var += d * d;
      }
      var /= h;
      const double istd = 1.0 / std::sqrt(var + cfg.ln_eps);
      cache.inv_std[l][i] = istd;
      double* xh = xhat.row(i);
      double* si = s.row(i);
      double* gi = sig.row(i);
      double* ai = act.row(i);
#pragma omp simd
      for (int j = 0; j < h; ++j) {
        xh[j] = (zi[j] - mean) * istd;
        si[j] = gain[j] * xh[j] + bias[j];
        gi[j] = 1.0 / (1.0 + std::exp(-si[j]));
        ai[j] = si[j] * gi[j];
      }
    }
    cur = &act;
  }

  linear_forward(*cur, p.flat.data() + p.layout.w_out, p.flat.data() + p.layout.b_out,
                 cfg.action_dim, cache.y, cache.wt_scratch);
}

Vec mlp_forward(const MlpParams& p, const Vec& a_in, double t, ForwardCache& cache) {
  Mat a(1, p.cfg.action_dim);
  if (static_cast<int>(a_in.size()) != p.cfg.action_dim)
    throw ShapeError("mlp_forward: input dim mismatch");
  for (int j = 0; j < p.cfg.action_dim; ++j) a(0, j) = a_in[j];
  mlp_forward_batch(p, a, Vec{t}, cache);
  return Vec(cache.y.row(0), cache.y.row(0) + p.cfg.action_dim);
}

Vec mlp_forward(const MlpParams& p, const Vec& a_in, double t) {
  ForwardCache cache;
  return mlp_forward(p, a_in, t, cache);
}

void mlp_backward_batch(const MlpParams& p, const ForwardCache& cache, const Mat& out_grad,
                        Vec& grad_flat) {
  const MlpConfig& cfg = p.cfg;
  const int bsz = cache.batch;
  if (out_grad.rows != bsz || out_grad.cols != cfg.action_dim)
    throw ShapeError("mlp_backward_batch: out_grad shape mismatch");
  if (grad_flat.size() != p.layout.total)
    throw ShapeError("mlp_backward_batch: gradient buffer size mismatch");

  // Output linear layer.
  const Mat& last_act = cache.act[cfg.depth - 1];
  {
    double* dw = grad_flat.data() + p.layout.w_out;
    double* db = grad_flat.data() + p.layout.b_out;
    for (int i = 0; i < bsz; ++i) {
      const double* g = out_grad.row(i);
      const double* a = last_act.row(i);
      for (int o = 0; o < cfg.action_dim; ++o) {
        db[o] += g[o];
        double* dwo = dw + static_cast<size_t>(o) * cfg.hidden;
        const double go = g[o];
#pragma omp simd
        for (int t = 0; t < cfg.hidden; ++t) dwo[t] += go * a[t];
      }
    }
  }

  // d(activation of last block) = out_grad * W_out.
  Mat dact(bsz, cfg.hidden);
  {
    const double* w = p.flat.data() + p.layout.w_out;
    for (int i = 0; i < bsz; ++i) {
      const double* g = out_grad.row(i);
      double* di = dact.row(i);
      for (int t = 0; t < cfg.hidden; ++t) di[t] = 0.0;
      for (int o = 0; o < cfg.action_dim; ++o) {
        const double go = g[o];
        const double* wo = w + static_cast<size_t>(o) * cfg.hidden;
#pragma omp simd
        for (int t = 0; t < cfg.hidden; ++t) di[t] += go * wo[t];
      }
    }
  }

  Mat dz;
  for (int l = cfg.depth - 1; l >= 0; --l) {
    const auto& blk = p.layout.blocks[l];
    const int h = blk.out;
    const double* gain = p.flat.data() + blk.gain;
    double* dgain = grad_flat.data() + blk.gain;
    double* dbias = grad_flat.data() + blk.bias;

    dz.rows = bsz;
    dz.cols = h;
    dz.data.resize(static_cast<size_t>(bsz) * h);

    for (int i = 0; i < bsz; ++i) {
      const double* da = dact.row(i);
      const double* si = cache.s[l].row(i);
      const double* gi = cache.sig[l].row(i);
      const double* xh = cache.xhat[l].row(i);
      double* dzi = dz.row(i);
      const double istd = cache.inv_std[l][i];

      // SiLU then LayerNorm affine.
      double mean_dxhat = 0.0;
      double mean_dxhat_xhat = 0.0;
#pragma omp simd reduction(+ : mean_dxhat, mean_dxhat_xhat)
      for (int j = 0; j < h; ++j) {
        const double ds = da[j] * gi[j] * (1.0 + si[j] * (1.0 - gi[j]));
        dgain[j] += ds * xh[j];
        dbias[j] += ds;
        const double dxh = ds * gain[j];
        dzi[j] = dxh;  // temporarily dxhat
        mean_dxhat += dxh;
        mean_dxhat_xhat += dxh * xh[j];
      }
      mean_dxhat /= h;
      mean_dxhat_xhat /= h;
#pragma omp simd
      for (int j = 0; j < h; ++j)
        dzi[j] = istd * (dzi[j] - mean_dxhat - xh[j] * mean_dxhat_xhat);
    }

    // Linear layer: weight/bias grads and downstream input grad.
    const Mat& input = (l == 0) ? cache.x0 : cache.act[l - 1];
    double* dw = grad_flat.data() + blk.w;
    double* db = grad_flat.data() + blk.b;
    for (int i = 0; i < bsz; ++i) {
      const double* dzi = dz.row(i);
      const double* xi = input.row(i);
      for (int o = 0; o < h; ++o) {
        const double g = dzi[o];
        if (g == 0.0) continue;
        db[o] += g;
        double* dwo = dw + static_cast<size_t>(o) * blk.in;
#pragma omp simd
        for (int t = 0; t < blk.in; ++t) dwo[t] += g * xi[t];
      }
    }
    if (l > 0) {
      // dInput = dz * W, with W already row-major (out x in).
      matmul_bias_tiled(dz.data.data(), bsz, h, p.flat.data() + blk.w, blk.in, nullptr, dact);
    }
  }
}

Vec mlp_backward(const MlpParams& p, const ForwardCache& cache, const Vec& out_grad) {
  if (static_cast<int>(out_grad.size()) != p.cfg.action_dim)
    throw ShapeError("mlp_backward: out_grad dim mismatch");
  Mat g(1, p.cfg.action_dim);
  for (int j = 0; j < p.cfg.action_dim; ++j) g(0, j) = out_grad[j];
  Vec grad(p.layout.total, 0.0);
  mlp_backward_batch(p, cache, g, grad);
  return grad;
}

}  // namespace halo

#include "halolab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "halolab/errors.hpp"
#include "halolab/parallel.hpp"
#include "halolab/rng.hpp"

namespace halo {

BatchDecoder pointwise_decoder(std::function<Vec(const Vec&)> f) {
  return [f = std::move(f)](const std::vector<Vec>& zs) {
    std::vector<Vec> out;
    out.reserve(zs.size());
    for (const auto& z : zs) out.push_back(f(z));
    return out;
  };
}

HallucinationReport estimate_hallucination(const BatchDecoder& decode, const Classifier& classify,
                                           int latent_dim, int n_modes, long n, int batch,
                                           uint64_t seed, int threads) {
  if (n < 1) throw ConfigError("estimate_hallucination: n must be >= 1");
  if (batch < 1) throw ConfigError("estimate_hallucination: batch must be >= 1");
  if (n_modes < 0) throw ConfigError("estimate_hallucination: n_modes must be >= 0");

  const int n_shards = static_cast<int>((n + batch - 1) / batch);
  struct ShardCounts {
    long forbidden = 0;
    std::vector<long> mode;
  };
  std::vector<ShardCounts> shards(n_shards);

  parallel_for(n_shards, threads, [&](int s) {
    Rng rng(shard_seed(seed, static_cast<uint64_t>(s)));
    const long lo = static_cast<long>(s) * batch;
    const long hi = std::min(n, lo + batch);
    const int count = static_cast<int>(hi - lo);
    std::vector<Vec> zs(count, Vec(latent_dim));
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < latent_dim; ++j) zs[i][j] = rng.normal();
    const std::vector<Vec> actions = decode(zs);
    if (static_cast<int>(actions.size()) != count)
      throw ShapeError("estimate_hallucination: decoder returned wrong batch size");
    ShardCounts& sc = shards[s];
    sc.mode.assign(n_modes, 0);
    for (int i = 0; i < count; ++i) {
      Classification c;
      try {
        c = classify(actions[i]);
      } catch (const std::exception& e) {
        throw NumericalError("estimate_hallucination: classifier failed at sample " +
                             std::to_string(lo + i) + ": " + e.what());
      }
      if (!c.safe) {
        sc.forbidden += 1;
      } else {
        if (c.mode < 0 || c.mode >= n_modes)
          throw ShapeError("estimate_hallucination: classifier returned mode " +
                           std::to_string(c.mode) + " outside [0, " + std::to_string(n_modes) +
                           ")");
        sc.mode[c.mode] += 1;
      }
    }
  });

  HallucinationReport rep;
  rep.n = n;
  rep.mode_count.assign(n_modes, 0);
  for (const auto& sc : shards) {
    rep.forbidden_count += sc.forbidden;
    for (int m = 0; m < n_modes; ++m) rep.mode_count[m] += sc.mode[m];
  }
  rep.h_hat = static_cast<double>(rep.forbidden_count) / n;
  rep.h_ci = wilson95(rep.forbidden_count, n);
  rep.mode_mass.resize(n_modes);
  rep.mode_ci.resize(n_modes);
  for (int m = 0; m < n_modes; ++m) {
    rep.mode_mass[m] = static_cast<double>(rep.mode_count[m]) / n;
    rep.mode_ci[m] = wilson95(rep.mode_count[m], n);
  }
  return rep;
}

LipschitzEstimate estimate_lipschitz(const BatchDecoder& decode, int latent_dim, uint64_t seed,
                                     double radius, long probes, double h, int threads) {
  if (probes < 1) throw ConfigError("estimate_lipschitz: probes must be >= 1");
  if (h <= 0.0) throw ConfigError("estimate_lipschitz: finite-difference step must be positive");
  if (radius <= 0.0) throw ConfigError("estimate_lipschitz: radius must be positive");

  LipschitzEstimate est;
  est.radius = radius;
  est.probes = probes;
  est.fd_step = h;

  std::vector<double> sig(probes, -1.0);  // -1 marks a skipped probe
  parallel_for(static_cast<int>(probes), threads, [&](int i) {
    Rng rng(shard_seed(seed, static_cast<uint64_t>(i)));
    // Rejection-sample the probe into B_R; exact, no boundary bias.
    Vec z(latent_dim);
    for (;;) {
      double sq = 0.0;
      for (int j = 0; j < latent_dim; ++j) {
        z[j] = rng.normal();
        sq += z[j] * z[j];
      }
      if (sq <= radius * radius) break;
    }
    // Central differences per latent coordinate, batched into one decode.
    std::vector<Vec> pts;
    pts.reserve(2 * latent_dim);
    for (int j = 0; j < latent_dim; ++j) {
      Vec zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      pts.push_back(std::move(zp));
      pts.push_back(std::move(zm));
    }
    std::vector<Vec> out;
    try {
      out = decode(pts);
    } catch (const std::exception&) {
      return;  // probe skipped; stays -1
    }
    const int out_dim = static_cast<int>(out[0].size());
    Mat jac(out_dim, latent_dim);
    for (int j = 0; j < latent_dim; ++j)
      for (int o = 0; o < out_dim; ++o)
        jac(o, j) = (out[2 * j][o] - out[2 * j + 1][o]) / (2.0 * h);
    sig[i] = svd_small(jac).front();
  });

  for (double s : sig) {
    if (s < 0.0) {
      est.skipped += 1;
    } else {
      est.sigma_max.push_back(s);
    }
  }
  if (est.sigma_max.empty())
    throw NumericalError("estimate_lipschitz: every probe failed to decode");

  std::vector<double> sorted = est.sigma_max;
  std::sort(sorted.begin(), sorted.end());
  auto quant = [&](double q) {
    const size_t idx = static_cast<size_t>(q * (sorted.size() - 1) + 0.5);
    return sorted[std::min(idx, sorted.size() - 1)];
  };
  est.l_hat = sorted.back();
  est.q50 = quant(0.50);
  est.q90 = quant(0.90);
  est.q99 = quant(0.99);
  return est;
}

Mat finite_diff_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
  if (h <= 0.0) throw ConfigError("finite_diff_jacobian: step must be positive");
  const int in_dim = static_cast<int>(x.size());
  Mat jac;
  for (int j = 0; j < in_dim; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vec fp = f(xp);
    const Vec fm = f(xm);
    if (!all_finite(fp) || !all_finite(fm))
      throw NumericalError("finite_diff_jacobian: non-finite evaluation at coordinate " +
                           std::to_string(j));
    if (j == 0) jac = Mat(static_cast<int>(fp.size()), in_dim);
    if (fp.size() != static_cast<size_t>(jac.rows))
      throw ShapeError("finite_diff_jacobian: inconsistent output dimension");
    for (int o = 0; o < jac.rows; ++o) jac(o, j) = (fp[o] - fm[o]) / (2.0 * h);
  }
  return jac;
}

JacobianChainReport jacobian_chain(const SteppedSampler& sampler, const Vec& z, double h) {
  const SamplerTrace tr = sampler.sample_trace(z);
  const int steps = sampler.step_count();
  const int d = sampler.dim();

  JacobianChainReport rep;
  rep.step_sigma_min.reserve(steps);

  Mat global;  // ordered product J_{K-1} ... J_0
  double log_sum = 0.0;
  bool any_zero = false;
  for (int k = 0; k < steps; ++k) {
    const Mat jk = finite_diff_jacobian(
        [&](const Vec& x) { return sampler.apply_step(k, x); }, tr.states[k], h);
    if (jk.rows != d || jk.cols != d)
      throw ShapeError("jacobian_chain: step map must be square in the action dimension");
    const double smin = svd_small(jk).back();
    rep.step_sigma_min.push_back(smin);
    if (smin > 0.0) {
      log_sum += std::log(smin);
    } else {
      any_zero = true;
    }
    if (k == 0) {
      global = jk;
    } else {
      Mat next;
      matmul_ab(jk, global, next);
      global = std::move(next);
    }
  }
  const auto sig = svd_small(global);
  rep.global_sigma_max = sig.front();
  rep.global_sigma_min = sig.back();
  rep.geomean_sigma_min = any_zero ? 0.0 : std::exp(log_sum / steps);
  return rep;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw ConfigError("log_spaced: need 0 < lo < hi and n >= 2");
  std::vector<double> grid(n);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    grid[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / (n - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

DistanceCurve distance_curve(const std::vector<Vec>& samples, const DistanceOracle& dist,
                             double delta_min, double delta_max, int grid_points) {
  if (samples.empty()) throw ConfigError("distance_curve: need at least one sample");
  if (!(delta_min > 0.0)) throw ConfigError("distance_curve: delta_min must be positive");

  DistanceCurve curve;
  curve.n = static_cast<long>(samples.size());
  curve.deltas = log_spaced(delta_min, delta_max, grid_points);

  // Distances are computed once and reused across the grid.
  std::vector<double> d(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    const DistanceSample s = dist(samples[i]);
    d[i] = s.distance;
    if (s.degenerate) curve.degenerate_count += 1;
  }
  std::vector<double> sorted = d;
  std::sort(sorted.begin(), sorted.end());
  auto quant = [&](double q) {
    const size_t idx = static_cast<size_t>(q * (sorted.size() - 1) + 0.5);
    return sorted[std::min(idx, sorted.size() - 1)];
  };
  curve.d_min = sorted.front();
  curve.d_q25 = quant(0.25);
  curve.d_med = quant(0.50);
  curve.d_q75 = quant(0.75);
  curve.d_q95 = quant(0.95);
  curve.d_max = sorted.back();

  curve.h_hat.resize(curve.deltas.size());
  curve.ci.resize(curve.deltas.size());
  for (size_t g = 0; g < curve.deltas.size(); ++g) {
    // Sorted distances: count strictly above delta with one binary search.
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), curve.deltas[g]);
    const long exceed = static_cast<long>(sorted.end() - it);
    curve.h_hat[g] = static_cast<double>(exceed) / curve.n;
    curve.ci[g] = wilson95(exceed, curve.n);
  }
  return curve;
}

std::vector<SeamPoint> seam_map(const BatchDecoder& decode, const Classifier& classify,
                                const SeamGridSpec& grid) {
  std::vector<SeamPoint> out;
  if (grid.nx <= 0 || grid.ny <= 0) return out;
  std::vector<Vec> zs;
  zs.reserve(static_cast<size_t>(grid.nx) * grid.ny);
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double zx =
          grid.nx == 1 ? grid.z_min
                       : grid.z_min + (grid.z_max - grid.z_min) * ix / (grid.nx - 1.0);
      const double zy =
          grid.ny == 1 ? grid.z_min
                       : grid.z_min + (grid.z_max - grid.z_min) * iy / (grid.ny - 1.0);
      zs.push_back(Vec{zx, zy});
    }
  }
  const std::vector<Vec> actions = decode(zs);
  out.reserve(zs.size());
  for (size_t i = 0; i < zs.size(); ++i) {
    SeamPoint p;
    p.zx = zs[i][0];
    p.zy = zs[i][1];
    p.ax = actions[i][0];
    p.ay = actions[i][1];
    p.cls = classify(actions[i]);
    out.push_back(p);
  }
  return out;
}

}  // namespace halo

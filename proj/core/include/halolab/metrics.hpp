#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "halolab/band_env.hpp"
#include "halolab/sampler_trace.hpp"
#include "halolab/special.hpp"
#include "halolab/svd.hpp"

namespace halo {

// Decodes a whole shard of latents at once (heads integrate in lockstep; a
// pointwise map just loops).
using BatchDecoder = std::function<std::vector<Vec>(const std::vector<Vec>&)>;
using Classifier = std::function<Classification(const Vec&)>;

BatchDecoder pointwise_decoder(std::function<Vec(const Vec&)> f);

// ---------------------------------------------------------------------------
// Hallucination estimation
// ---------------------------------------------------------------------------

struct HallucinationReport {
  long n = 0;
  long forbidden_count = 0;
  std::vector<long> mode_count;       // per mode
  double h_hat = 0.0;                 // forbidden fraction
  WilsonInterval h_ci;
  std::vector<double> mode_mass;      // p_i
  std::vector<WilsonInterval> mode_ci;
};

// Draws n standard-normal latents in shards of `batch`, decodes, classifies.
// Results depend only on (seed, batch), never on the thread count.
HallucinationReport estimate_hallucination(const BatchDecoder& decode, const Classifier& classify,
                                           int latent_dim, int n_modes, long n, int batch,
                                           uint64_t seed, int threads = 1);

// ---------------------------------------------------------------------------
// Smoothness and Jacobian diagnostics
// ---------------------------------------------------------------------------

struct LipschitzEstimate {
  double radius = 3.0;
  long probes = 0;
  double fd_step = 0.01;
  std::vector<double> sigma_max;  // one operator-norm estimate per probe
  double l_hat = 0.0;             // max over probes
  double q50 = 0.0, q90 = 0.0, q99 = 0.0;
  long skipped = 0;  // probes whose decode failed
};

// Local Lipschitz proxy: largest finite-difference singular value at probe
// latents rejection-sampled into the ball B_R.
LipschitzEstimate estimate_lipschitz(const BatchDecoder& decode, int latent_dim, uint64_t seed,
                                     double radius = 3.0, long probes = 2048, double h = 0.01,
                                     int threads = 1);

// Central-difference Jacobian of f at x; output dims (f(x).size() x x.size()).
Mat finite_diff_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h);

struct JacobianChainReport {
  std::vector<double> step_sigma_min;  // sigma_min(J F_k) at the visited states
  double global_sigma_min = 0.0;       // sigma_min of the ordered product
  double global_sigma_max = 0.0;
  double geomean_sigma_min = 0.0;      // geometric mean of per-step sigma_min
};

// Differentiates each per-step map along the trajectory from z and multiplies
// the per-step Jacobians into the global one.
JacobianChainReport jacobian_chain(const SteppedSampler& sampler, const Vec& z, double h);

// ---------------------------------------------------------------------------
// Distance curves
// ---------------------------------------------------------------------------

struct DistanceSample {
  double distance = 0.0;
  bool degenerate = false;
};
using DistanceOracle = std::function<DistanceSample(const Vec&)>;

struct DistanceCurve {
  std::vector<double> deltas;   // log-spaced grid
  std::vector<double> h_hat;    // fraction of samples with distance > delta
  std::vector<WilsonInterval> ci;
  long n = 0;
  long degenerate_count = 0;
  // raw distance summary
  double d_min = 0.0, d_q25 = 0.0, d_med = 0.0, d_q75 = 0.0, d_q95 = 0.0, d_max = 0.0;
};

DistanceCurve distance_curve(const std::vector<Vec>& samples, const DistanceOracle& dist,
                             double delta_min, double delta_max, int grid_points);

std::vector<double> log_spaced(double lo, double hi, int n);

// ---------------------------------------------------------------------------
// Seam maps
// ---------------------------------------------------------------------------

struct SeamGridSpec {
  double z_min = -3.0;
  double z_max = 3.0;
  int nx = 101;
  int ny = 101;
};

struct SeamPoint {
  double zx, zy;
  double ax, ay;
  Classification cls;
};

// Decodes every grid latent and attaches its action-space classification.
std::vector<SeamPoint> seam_map(const BatchDecoder& decode, const Classifier& classify,
                                const SeamGridSpec& grid);

}  // namespace halo

#pragma once

#include <vector>

#include "halolab/linalg.hpp"
#include "halolab/rng.hpp"

namespace halo {

// Side-grasp manifold in R^7: a = [x, y, h, roll, pitch, sin(yaw), cos(yaw)].
// Intrinsic coordinates are the ring angle theta and the height h; yaw faces
// inward, yaw(theta) = theta + pi. Codimension is 7 - 2 = 5.
struct GraspManifold {
  double ring_radius = 1.0;
  double h_min = 0.0;
  double h_max = 1.0;

  static constexpr int ambient_dim = 7;
  static constexpr int intrinsic_dim = 2;
  static constexpr int codim = ambient_dim - intrinsic_dim;

  void validate() const;
};

// Chart map (theta, h) -> R^7. Throws ConfigError when h is out of range.
Vec grasp_chart(const GraspManifold& m, double theta, double h);

struct GraspProjection {
  Vec point;        // nearest manifold point
  double distance = 0.0;
  double theta = 0.0;  // chart angle of the projection
  double h = 0.0;
  bool degenerate = false;  // theta* was ill-defined; theta = 0 was used
};

// Closed-form nearest-point projection: theta* = atan2(r*y - sin_yaw, r*x - cos_yaw),
// h clamped into [h_min, h_max], roll/pitch zeroed.
GraspProjection grasp_project(const GraspManifold& m, const Vec& a);

inline double grasp_distance(const GraspManifold& m, const Vec& a) {
  return grasp_project(m, a).distance;
}

// Uniform (theta, h) pushed through the chart plus isotropic ambient Gaussian
// noise of scale noise_sigma (0 gives exactly on-manifold samples).
std::vector<Vec> grasp_sample_training(const GraspManifold& m, double noise_sigma, long n,
                                       Rng& rng);

}  // namespace halo

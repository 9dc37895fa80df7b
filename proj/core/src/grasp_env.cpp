#include "halolab/grasp_env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "halolab/errors.hpp"

namespace halo {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void GraspManifold::validate() const {
  if (ring_radius <= 0.0) throw ConfigError("GraspManifold: ring radius must be positive");
  if (!(h_min < h_max)) throw ConfigError("GraspManifold: need h_min < h_max");
}

Vec grasp_chart(const GraspManifold& m, double theta, double h) {
  if (h < m.h_min || h > m.h_max)
    throw ConfigError("grasp_chart: h = " + std::to_string(h) + " outside [" +
                      std::to_string(m.h_min) + ", " + std::to_string(m.h_max) + "]");
  const double yaw = theta + 3.14159265358979323846;  // inward-facing
  return Vec{m.ring_radius * std::cos(theta),
             m.ring_radius * std::sin(theta),
             h,
             0.0,
             0.0,
             std::sin(yaw),
             std::cos(yaw)};
}

GraspProjection grasp_project(const GraspManifold& m, const Vec& a) {
  if (a.size() != GraspManifold::ambient_dim) throw ShapeError("grasp_project: expected a 7-vector");
  const double r = m.ring_radius;
  const double x = a[0], y = a[1], h = a[2], roll = a[3], pitch = a[4];
  const double sy = a[5], cy = a[6];

  // theta* maximizes <(x,y), r*(cos,sin)> + <(sy,cy), (sin(theta+pi), cos(theta+pi))>.
  const double gy = r * y - sy;
  const double gx = r * x - cy;
  GraspProjection proj;
  if (gx == 0.0 && gy == 0.0) {
    proj.degenerate = true;
    proj.theta = 0.0;
  } else {
    proj.theta = std::atan2(gy, gx);
  }
  proj.h = std::clamp(h, m.h_min, m.h_max);
  proj.point = grasp_chart(m, proj.theta, proj.h);

  double sq = 0.0;
  const double dh = h - proj.h;
  sq += (x - proj.point[0]) * (x - proj.point[0]);
  sq += (y - proj.point[1]) * (y - proj.point[1]);
  sq += dh * dh;
  sq += roll * roll + pitch * pitch;
  sq += (sy - proj.point[5]) * (sy - proj.point[5]);
  sq += (cy - proj.point[6]) * (cy - proj.point[6]);
  proj.distance = std::sqrt(sq);
  return proj;
}

std::vector<Vec> grasp_sample_training(const GraspManifold& m, double noise_sigma, long n,
                                       Rng& rng) {
  if (n < 1) throw ConfigError("grasp_sample_training: n must be >= 1");
  if (noise_sigma < 0.0) throw ConfigError("grasp_sample_training: noise_sigma must be >= 0");
  std::vector<Vec> out;
  out.reserve(n);
  for (long k = 0; k < n; ++k) {
    const double theta = rng.uniform(0.0, kTwoPi);
    const double h = rng.uniform(m.h_min, m.h_max);
    Vec a = grasp_chart(m, theta, h);
    if (noise_sigma > 0.0)
      for (double& v : a) v += noise_sigma * rng.normal();
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace halo

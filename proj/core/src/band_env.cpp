#include "halolab/band_env.hpp"

#include <cmath>
#include <string>

#include "halolab/errors.hpp"

namespace halo {

void BandGeometry::validate() const {
  if (modes < 2) throw ConfigError("BandGeometry: need at least 2 modes, got " + std::to_string(modes));
  if (strip_halfwidth <= 0.0 || gap_halfwidth <= 0.0)
    throw ConfigError("BandGeometry: strip and gap half-widths must be positive");
  if (!(x_min < x_max)) throw ConfigError("BandGeometry: x_min must be below x_max");
  if (y_max <= 0.0) throw ConfigError("BandGeometry: y_max must be positive");
  const double top = center(modes - 1) + strip_halfwidth;
  if (top > y_max + 1e-12)
    throw ConfigError("BandGeometry: strips exceed the band extent; need y_max >= " +
                      std::to_string(top));
}

Classification band_classify(const BandGeometry& geom, double x, double y) {
  if (x < geom.x_min || x > geom.x_max) return Classification::forbidden();
  // Strips are disjoint, so at most one center can be within r of y.
  for (int i = 0; i < geom.modes; ++i) {
    if (std::fabs(y - geom.center(i)) <= geom.strip_halfwidth) return Classification::safe_mode(i);
  }
  return Classification::forbidden();
}

std::vector<Vec> band_sample_training(const BandGeometry& geom, long n, Rng& rng) {
  if (n < 1) throw ConfigError("band_sample_training: n must be >= 1");
  std::vector<Vec> out;
  out.reserve(n);
  for (long k = 0; k < n; ++k) {
    const int mode = static_cast<int>(rng.below(static_cast<uint64_t>(geom.modes)));
    const double x = rng.uniform(geom.x_min, geom.x_max);
    const double mu = geom.center(mode);
    const double y = rng.uniform(mu - geom.strip_halfwidth, mu + geom.strip_halfwidth);
    out.push_back(Vec{x, y});
  }
  return out;
}

}  // namespace halo

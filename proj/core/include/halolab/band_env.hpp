#pragma once

#include <vector>

#include "halolab/linalg.hpp"
#include "halolab/rng.hpp"

namespace halo {

// Tagged classification of an action: exactly one safe mode index, or forbidden.
struct Classification {
  bool safe = false;
  int mode = -1;  // valid only when safe

  static Classification forbidden() { return {false, -1}; }
  static Classification safe_mode(int i) { return {true, i}; }
  bool operator==(const Classification&) const = default;
};

// M horizontal safe strips inside a 2-D action band, separated by forbidden
// gaps of width 2W. Strip centers sit symmetrically about zero with spacing
// 2(r + W).
struct BandGeometry {
  int modes = 2;              // M >= 2
  double strip_halfwidth = 0.5;  // r > 0
  double gap_halfwidth = 0.25;   // W > 0
  double x_min = -1.0;
  double x_max = 1.0;
  double y_max = 2.0;  // band extent in |y|

  // Center of strip i: (i - (M-1)/2) * 2(r + W).
  double center(int i) const {
    return (i - 0.5 * (modes - 1)) * 2.0 * (strip_halfwidth + gap_halfwidth);
  }

  // Smallest band extent that contains every strip plus one extra gap.
  static double fitted_y_max(int modes, double r, double w) {
    return 0.5 * (modes - 1) * 2.0 * (r + w) + r + 2.0 * w;
  }

  void validate() const;  // throws ConfigError when the invariants fail
};

// Safe(i) iff x in [x_min, x_max] and |y - mu_i| <= r; forbidden otherwise.
Classification band_classify(const BandGeometry& geom, double x, double y);
inline Classification band_classify(const BandGeometry& geom, const Vec& a) {
  return band_classify(geom, a[0], a[1]);
}

// Training distribution: uniform mode, uniform x in the band, uniform y in the
// strip. Every sample classifies safe by construction.
std::vector<Vec> band_sample_training(const BandGeometry& geom, long n, Rng& rng);

}  // namespace halo

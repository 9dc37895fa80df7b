#include "halolab/svd.hpp"

#include <algorithm>
#include <cmath>

#include "halolab/errors.hpp"

namespace halo {

std::vector<double> svd_small(const Mat& a) {
  if (a.rows <= 0 || a.cols <= 0) throw ShapeError("svd_small: empty matrix");
  for (double v : a.data)
    if (!std::isfinite(v)) throw NumericalError("svd_small: non-finite entry");

  // Work on a tall copy so column rotations see m >= n.
  Mat u;
  if (a.rows >= a.cols) {
    u = a;
  } else {
    u = Mat(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
      for (int j = 0; j < a.cols; ++j) u(j, i) = a(i, j);
  }
  const int m = u.rows;
  const int n = u.cols;

  auto col_dot = [&](int p, int q) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += u(i, p) * u(i, q);
    return s;
  };

  const int max_sweeps = 60;
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    converged = true;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double app = col_dot(p, p);
        const double aqq = col_dot(q, q);
        const double apq = col_dot(p, q);
        if (std::fabs(apq) <= 1e-15 * std::sqrt(app * aqq) || apq == 0.0) continue;
        converged = false;
        // Jacobi rotation annihilating the (p,q) Gram entry.
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < m; ++i) {
          const double up = u(i, p);
          const double uq = u(i, q);
          u(i, p) = c * up - s * uq;
          u(i, q) = s * up + c * uq;
        }
      }
    }
  }
  if (!converged) throw NumericalError("svd_small: Jacobi sweeps did not converge");

  std::vector<double> sigma(n);
  for (int j = 0; j < n; ++j) sigma[j] = std::sqrt(col_dot(j, j));
  std::sort(sigma.begin(), sigma.end(), std::greater<double>());
  return sigma;
}

}  // namespace halo

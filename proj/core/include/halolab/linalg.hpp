#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include "halolab/errors.hpp"

namespace halo {

using Vec = std::vector<double>;

// Dense row-major matrix. Small and boring on purpose; the hot paths below
// keep the innermost loop contiguous so the compiler can vectorize them.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
  double* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return data.data() + static_cast<size_t>(i) * cols; }
  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

// C = A * B^T, i.e. C(i,o) = dot(A.row(i), B.row(o)). A: m x k, B: n x k, C: m x n.
inline void matmul_abt(const Mat& a, const Mat& b, Mat& c) {
  assert(a.cols == b.cols);
  c.rows = a.rows;
  c.cols = b.rows;
  c.data.assign(static_cast<size_t>(c.rows) * c.cols, 0.0);
  const int k = a.cols;
  for (int i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (int o = 0; o < b.rows; ++o) {
      const double* bo = b.row(o);
      double s = 0.0;
      for (int t = 0; t < k; ++t) s += ai[t] * bo[t];
      ci[o] = s;
    }
  }
}

// C = A * B. A: m x k, B: k x n, C: m x n (accumulated row-wise for locality).
inline void matmul_ab(const Mat& a, const Mat& b, Mat& c) {
  assert(a.cols == b.rows);
  c.rows = a.rows;
  c.cols = b.cols;
  c.data.assign(static_cast<size_t>(c.rows) * c.cols, 0.0);
  for (int i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (int t = 0; t < a.cols; ++t) {
      const double av = ai[t];
      const double* bt = b.row(t);
      for (int j = 0; j < b.cols; ++j) ci[j] += av * bt[j];
    }
  }
}

// C += A^T * B. A: n x m, B: n x k, C: m x k. Used for weight gradients.
inline void matmul_atb_add(const Mat& a, const Mat& b, Mat& c) {
  assert(a.rows == b.rows && c.rows == a.cols && c.cols == b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    const double* bi = b.row(i);
    for (int t = 0; t < a.cols; ++t) {
      const double av = ai[t];
      double* ct = c.row(t);
      for (int j = 0; j < b.cols; ++j) ct[j] += av * bi[j];
    }
  }
}

// C.row(i) = bias + sum_t A(i,t) * B.row(t). A: m x k row-major, B: k x n
// row-major, C: m x n. Register-tiled (2 rows x 32 columns) so the
// accumulators stay out of the store-to-load path; per-element accumulation
// order matches the naive i-k-j loop exactly.
inline void matmul_bias_tiled(const double* a, int m, int k, const double* b, int n,
                              const double* bias, Mat& c) {
  c.rows = m;
  c.cols = n;
  c.data.resize(static_cast<size_t>(m) * n);
  constexpr int TILE = 32;
  double acc0[TILE], acc1[TILE];
  for (int i = 0; i < m; i += 2) {
    const bool pair = i + 1 < m;
    const double* a0 = a + static_cast<size_t>(i) * k;
    const double* a1 = pair ? a0 + k : a0;
    double* c0 = c.row(i);
    double* c1 = pair ? c.row(i + 1) : c0;
    for (int j0 = 0; j0 < n; j0 += TILE) {
      const int jn = std::min(TILE, n - j0);
#pragma omp simd
      for (int j = 0; j < jn; ++j) {
        acc0[j] = bias ? bias[j0 + j] : 0.0;
        acc1[j] = acc0[j];
      }
      for (int t = 0; t < k; ++t) {
        const double av0 = a0[t];
        const double av1 = a1[t];
        const double* br = b + static_cast<size_t>(t) * n + j0;
#pragma omp simd
        for (int j = 0; j < jn; ++j) {
          acc0[j] += av0 * br[j];
          acc1[j] += av1 * br[j];
        }
      }
#pragma omp simd
      for (int j = 0; j < jn; ++j) c0[j0 + j] = acc0[j];
      if (pair) {
#pragma omp simd
        for (int j = 0; j < jn; ++j) c1[j0 + j] = acc1[j];
      }
    }
  }
}

inline void matmul_bias_tiled(const Mat& a, const Mat& b, const double* bias, Mat& c) {
  assert(a.cols == b.rows);
  matmul_bias_tiled(a.data.data(), a.rows, a.cols, b.data.data(), b.cols, bias, c);
}

inline double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline bool all_finite(const Vec& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace halo

#pragma once

// Test-only reference computations. Nothing here calls into the library's solvers.

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace convdiff::oracle {

using DenseMatrix = std::vector<std::vector<double>>;

/// Gaussian elimination with partial pivoting on a dense copy.
inline std::vector<double> dense_solve(DenseMatrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    if (a[p][k] == 0.0) throw std::runtime_error("singular dense matrix");
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= l * a[k][j];
      b[i] -= l * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * x[j];
    x[k] = s / a[k][k];
  }
  return x;
}

/// Random strictly diagonally dominant tridiagonal matrix as (lower, diag, upper).
struct RandomTridiagonal {
  std::vector<double> lower, diag, upper, rhs;
};

inline RandomTridiagonal random_tridiagonal(std::size_t n, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RandomTridiagonal t;
  t.lower.resize(n - 1);
  t.upper.resize(n - 1);
  t.diag.resize(n);
  t.rhs.resize(n);
  for (auto &v : t.lower) v = u(rng);
  for (auto &v : t.upper) v = u(rng);
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    if (i > 0) off += std::abs(t.lower[i - 1]);
    if (i + 1 < n) off += std::abs(t.upper[i]);
    t.diag[i] = (u(rng) > 0 ? 1.0 : -1.0) * (off + 0.5 + std::abs(u(rng)));
    t.rhs[i] = u(rng);
  }
  return t;
}

inline DenseMatrix to_dense(const RandomTridiagonal &t) {
  const std::size_t n = t.diag.size();
  DenseMatrix a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = t.diag[i];
    if (i > 0) a[i][i - 1] = t.lower[i - 1];
    if (i + 1 < n) a[i][i + 1] = t.upper[i];
  }
  return a;
}

/// Random dense matrix with strict row dominance.
inline DenseMatrix random_dominant(std::size_t n, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      a[i][j] = u(rng);
      off += std::abs(a[i][j]);
    }
    a[i][i] = off + 1.0;
  }
  return a;
}

/// Second-order central differences for u', u''.
template <class F>
double d1(F &&u, double x, double h) {
  return (u(x + h) - u(x - h)) / (2.0 * h);
}

template <class F>
double d2(F &&u, double x, double h) {
  return (u(x + h) - 2.0 * u(x) + u(x - h)) / (h * h);
}

/// 5-point Laplacian on an m x m interior grid of spacing 1/(m+1), dense.
inline DenseMatrix dense_laplacian(std::size_t m) {
  const double h = 1.0 / static_cast<double>(m + 1);
  const std::size_t n = m * m;
  DenseMatrix a(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t r = j * m + i;
      a[r][r] = 4.0 / (h * h);
      if (i > 0) a[r][r - 1] = -1.0 / (h * h);
      if (i + 1 < m) a[r][r + 1] = -1.0 / (h * h);
      if (j > 0) a[r][r - m] = -1.0 / (h * h);
      if (j + 1 < m) a[r][r + m] = -1.0 / (h * h);
    }
  }
  return a;
}

} // namespace convdiff::oracle

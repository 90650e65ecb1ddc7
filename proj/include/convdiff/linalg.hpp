#pragma once

#include "convdiff/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace convdiff {

// ---------------------------------------------------------------------------
// Vector helpers

inline double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double two_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

// ---------------------------------------------------------------------------
// Tridiagonal systems

/// Row k reads lower[k-1] u_{k-1} + diag[k] u_k + upper[k] u_{k+1} = rhs[k].
struct TridiagonalSystem {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;
  std::vector<double> rhs;

  std::size_t size() const noexcept { return diag.size(); }

  void validate() const {
    const std::size_t n = diag.size();
    if (n == 0) throw std::invalid_argument("empty tridiagonal system");
    if (lower.size() + 1 != n || upper.size() + 1 != n || rhs.size() != n)
      throw std::invalid_argument("inconsistent tridiagonal array lengths");
    for (const auto *arr : {&lower, &diag, &upper, &rhs})
      for (double v : *arr)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite tridiagonal entry");
  }

  std::vector<double> apply(std::span<const double> u) const {
    const std::size_t n = size();
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
      double s = diag[k] * u[k];
      if (k > 0) s += lower[k - 1] * u[k - 1];
      if (k + 1 < n) s += upper[k] * u[k + 1];
      out[k] = s;
    }
    return out;
  }

  double matrix_max_norm() const {
    const std::size_t n = size();
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double s = std::abs(diag[k]);
      if (k > 0) s += std::abs(lower[k - 1]);
      if (k + 1 < n) s += std::abs(upper[k]);
      m = std::max(m, s);
    }
    return m;
  }
};

/// Thomas elimination without pivoting. Throws zero_pivot_error on breakdown.
inline std::vector<double> solve_tridiagonal(const TridiagonalSystem &sys) {
  sys.validate();
  const std::size_t n = sys.size();
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double pivot = sys.diag[k];
    double r = sys.rhs[k];
    if (k > 0) {
      pivot -= sys.lower[k - 1] * c[k - 1];
      r -= sys.lower[k - 1] * d[k - 1];
    }
    if (pivot == 0.0 || !std::isfinite(pivot)) throw zero_pivot_error(k);
    if (k + 1 < n) c[k] = sys.upper[k] / pivot;
    d[k] = r / pivot;
  }
  std::vector<double> u(n);
  u[n - 1] = d[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) u[k] = d[k] - c[k] * u[k + 1];
  return u;
}

// ---------------------------------------------------------------------------
// Compressed sparse rows

struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col;
  std::vector<double> val;

  std::size_t nonzeros() const noexcept { return val.size(); }

  double at(std::size_t i, std::size_t j) const {
    const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return val[static_cast<std::size_t>(it - col.begin())];
  }

  void apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
      y[i] = s;
    }
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(n);
    apply(x, y);
    return y;
  }

  /// Largest |i - j| over stored entries.
  std::size_t bandwidth() const {
    std::size_t bw = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        bw = std::max(bw, i > col[k] ? i - col[k] : col[k] - i);
    return bw;
  }

  std::size_t lower_bandwidth() const {
    std::size_t bw = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        if (col[k] < i) bw = std::max(bw, i - col[k]);
    return bw;
  }

  std::size_t upper_bandwidth() const {
    std::size_t bw = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        if (col[k] > i) bw = std::max(bw, col[k] - i);
    return bw;
  }

  double max_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += std::abs(val[k]);
      m = std::max(m, s);
    }
    return m;
  }
};

/// Accumulates (i, j, value) contributions row by row; duplicates are summed and exact
/// zeros dropped on compression.
class SparseBuilder {
public:
  explicit SparseBuilder(std::size_t n) : rows_(n) {}

  std::size_t size() const noexcept { return rows_.size(); }

  void add(std::size_t i, std::size_t j, double v) {
    if (i >= rows_.size() || j >= rows_.size())
      throw std::out_of_range("sparse entry outside the matrix");
    rows_[i].emplace_back(j, v);
  }

  CsrMatrix compress() && {
    CsrMatrix m;
    m.n = rows_.size();
    m.row_ptr.assign(1, 0);
    for (auto &row : rows_) {
      std::sort(row.begin(), row.end(),
                [](const auto &a, const auto &b) { return a.first < b.first; });
      std::size_t k = 0;
      while (k < row.size()) {
        const std::size_t j = row[k].first;
        double s = 0.0;
        for (; k < row.size() && row[k].first == j; ++k) s += row[k].second;
        if (s != 0.0) {
          m.col.push_back(j);
          m.val.push_back(s);
        }
      }
      m.row_ptr.push_back(m.col.size());
      row.clear();
      row.shrink_to_fit();
    }
    return m;
  }

private:
  std::vector<std::vector<std::pair<std::size_t, double>>> rows_;
};

struct SparseSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;

  std::size_t size() const noexcept { return matrix.n; }
};

inline SparseSystem to_sparse(const TridiagonalSystem &sys) {
  sys.validate();
  const std::size_t n = sys.size();
  SparseBuilder builder(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) builder.add(k, k - 1, sys.lower[k - 1]);
    builder.add(k, k, sys.diag[k]);
    if (k + 1 < n) builder.add(k, k + 1, sys.upper[k]);
  }
  return {std::move(builder).compress(), sys.rhs};
}

/// Normwise backward error ||b - Ax|| / (||A|| ||x|| + ||b||) in the max norm.
inline double relative_residual(const CsrMatrix &a, std::span<const double> x,
                                std::span<const double> b) {
  std::vector<double> r = a.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double scale = a.max_norm() * max_norm(x) + max_norm(b);
  return scale > 0.0 ? max_norm(r) / scale : 0.0;
}

// ---------------------------------------------------------------------------
// Sparse solvers

enum class SolverMethod { automatic, banded_direct, bicgstab };

struct SolveOptions {
  double tol = 1e-10;
  SolverMethod method = SolverMethod::automatic;
};

struct SparseSolveResult {
  std::vector<double> values;
  double relative_residual = 0.0;
  std::size_t iterations = 0;
  SolverMethod method = SolverMethod::banded_direct;
};

namespace detail {

/// Banded Gaussian elimination with partial pivoting. Row i stores columns
/// [i - kl, i + kl + ku] so that row swaps within the lower band stay representable.
class BandedLU {
public:
  BandedLU(const CsrMatrix &a)
      : n_(a.n), kl_(a.lower_bandwidth()), ku_(a.upper_bandwidth()), width_(2 * kl_ + ku_ + 1),
        band_(n_ * width_, 0.0), perm_(n_) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) ref(i, a.col[k]) = a.val[k];
    factor();
  }

  std::vector<double> solve(std::span<const double> b) const {
    std::vector<double> x(b.begin(), b.end());
    for (std::size_t k = 0; k < n_; ++k) {
      std::swap(x[k], x[perm_[k]]);
      const std::size_t last = std::min(n_ - 1, k + kl_);
      for (std::size_t i = k + 1; i <= last; ++i) x[i] -= get(i, k) * x[k];
    }
    for (std::size_t k = n_; k-- > 0;) {
      const std::size_t last = std::min(n_ - 1, k + kl_ + ku_);
      double s = x[k];
      for (std::size_t j = k + 1; j <= last; ++j) s -= get(k, j) * x[j];
      x[k] = s / get(k, k);
    }
    return x;
  }

private:
  double &ref(std::size_t i, std::size_t j) { return band_[i * width_ + (j + kl_ - i)]; }
  double get(std::size_t i, std::size_t j) const { return band_[i * width_ + (j + kl_ - i)]; }

  void factor() {
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t last_row = std::min(n_ - 1, k + kl_);
      const std::size_t last_col = std::min(n_ - 1, k + kl_ + ku_);
      std::size_t p = k;
      double best = std::abs(get(k, k));
      for (std::size_t i = k + 1; i <= last_row; ++i) {
        if (std::abs(get(i, k)) > best) {
          best = std::abs(get(i, k));
          p = i;
        }
      }
      if (best == 0.0 || !std::isfinite(best)) throw zero_pivot_error(k);
      perm_[k] = p;
      if (p != k)
        for (std::size_t j = k; j <= last_col; ++j) std::swap(ref(k, j), ref(p, j));
      const double pivot = get(k, k);
      for (std::size_t i = k + 1; i <= last_row; ++i) {
        const double l = get(i, k) / pivot;
        ref(i, k) = l;
        if (l == 0.0) continue;
        for (std::size_t j = k + 1; j <= last_col; ++j) ref(i, j) -= l * get(k, j);
      }
    }
  }

  std::size_t n_, kl_, ku_, width_;
  std::vector<double> band_;
  std::vector<std::size_t> perm_;
};

inline SparseSolveResult solve_banded(const SparseSystem &sys, double tol) {
  const BandedLU lu(sys.matrix);
  SparseSolveResult res;
  res.method = SolverMethod::banded_direct;
  res.values = lu.solve(sys.rhs);
  res.relative_residual = relative_residual(sys.matrix, res.values, sys.rhs);
  // A few steps of iterative refinement recover accuracy lost to growth in the factors.
  for (int step = 0; step < 3 && res.relative_residual > tol; ++step) {
    std::vector<double> r = sys.matrix.apply(res.values);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = sys.rhs[i] - r[i];
    const std::vector<double> dx = lu.solve(r);
    for (std::size_t i = 0; i < dx.size(); ++i) res.values[i] += dx[i];
    res.relative_residual = relative_residual(sys.matrix, res.values, sys.rhs);
    ++res.iterations;
  }
  if (!(res.relative_residual <= tol))
    throw numerical_error("banded elimination left relative residual " +
                          detail::sci(res.relative_residual));
  return res;
}

/// BiCGStab with Jacobi (diagonal) right preconditioning.
inline SparseSolveResult solve_bicgstab(const SparseSystem &sys, double tol) {
  const CsrMatrix &a = sys.matrix;
  const std::size_t n = a.n;
  const std::size_t max_iter = 20 * n;

  std::vector<double> inv_diag(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.at(i, i);
    if (d != 0.0) inv_diag[i] = 1.0 / d;
  }

  SparseSolveResult res;
  res.method = SolverMethod::bicgstab;
  std::vector<double> &x = res.values;
  x.assign(n, 0.0);

  const double bnorm = max_norm(sys.rhs);
  if (bnorm == 0.0) return res;
  const double anorm = a.max_norm();
  const auto backward_error = [&](std::span<const double> resid, std::span<const double> iterate) {
    return max_norm(resid) / (anorm * max_norm(iterate) + bnorm);
  };

  std::vector<double> r(sys.rhs), r_hat(r), p(n, 0.0), v(n, 0.0), y(n), s(n), z(n), t(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double rel = 1.0;

  for (std::size_t it = 1; it <= max_iter; ++it) {
    const double rho_new = dot(r_hat, r);
    if (rho_new == 0.0 || omega == 0.0) {
      // Breakdown: restart from the current iterate with a fresh shadow residual.
      a.apply(x, r);
      for (std::size_t i = 0; i < n; ++i) r[i] = sys.rhs[i] - r[i];
      r_hat = r;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rho = alpha = omega = 1.0;
      if (dot(r_hat, r) == 0.0) break;
      continue;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    for (std::size_t i = 0; i < n; ++i) y[i] = inv_diag[i] * p[i];
    a.apply(y, v);
    const double rv = dot(r_hat, v);
    if (rv == 0.0) {
      omega = 0.0;
      continue;
    }
    alpha = rho / rv;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] + alpha * y[i];
    if (backward_error(s, z) <= tol) {
      x = z;
      res.iterations = it;
      rel = relative_residual(a, x, sys.rhs);
      if (rel <= tol) break;
      a.apply(x, r);
      for (std::size_t i = 0; i < n; ++i) r[i] = sys.rhs[i] - r[i];
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * s[i];
    a.apply(z, t);
    const double tt = dot(t, t);
    omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * y[i] + omega * z[i];
      r[i] = s[i] - omega * t[i];
    }
    res.iterations = it;
    if (backward_error(r, x) <= tol) {
      rel = relative_residual(a, x, sys.rhs);
      if (rel <= tol) break;
    }
  }
  res.relative_residual = relative_residual(a, x, sys.rhs);
  if (!(res.relative_residual <= tol))
    throw convergence_error(res.iterations, res.relative_residual);
  return res;
}

} // namespace detail

/// Bandwidth below which the automatic strategy factors directly: 2(N+1) for a grid with
/// (N-1)^2 interior unknowns.
inline std::size_t direct_bandwidth_limit(std::size_t unknowns) {
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(unknowns))));
  return 2 * (side + 2);
}

inline SparseSolveResult solve_sparse(const SparseSystem &sys, const SolveOptions &opts = {}) {
  if (sys.rhs.size() != sys.matrix.n) throw std::invalid_argument("rhs length mismatch");
  if (sys.matrix.n == 0) return {};
  SolverMethod method = opts.method;
  if (method == SolverMethod::automatic) {
    method = sys.matrix.bandwidth() <= direct_bandwidth_limit(sys.matrix.n)
                 ? SolverMethod::banded_direct
                 : SolverMethod::bicgstab;
  }
  if (method == SolverMethod::banded_direct) return detail::solve_banded(sys, opts.tol);
  return detail::solve_bicgstab(sys, opts.tol);
}

// ---------------------------------------------------------------------------
// M-matrix diagnostics

enum class MMatrixViolationKind {
  nonpositive_diagonal,
  positive_offdiagonal,
  not_diagonally_dominant,
  no_strictly_dominant_row,
};

inline const char *to_string(MMatrixViolationKind k) {
  switch (k) {
  case MMatrixViolationKind::nonpositive_diagonal: return "nonpositive_diagonal";
  case MMatrixViolationKind::positive_offdiagonal: return "positive_offdiagonal";
  case MMatrixViolationKind::not_diagonally_dominant: return "not_diagonally_dominant";
  case MMatrixViolationKind::no_strictly_dominant_row: return "no_strictly_dominant_row";
  }
  return "?";
}

struct MMatrixViolation {
  MMatrixViolationKind kind;
  std::size_t row;
  std::size_t col; ///< column of the offending entry; equals row for row-level violations
  double value;    ///< offending entry, or the row's dominance margin a_ii - sum |a_ij|
};

struct MMatrixReport {
  bool is_candidate = false;
  std::vector<MMatrixViolation> violations;
};

namespace detail {

template <class RowVisitor>
MMatrixReport check_m_matrix(std::size_t n, RowVisitor &&visit_row) {
  constexpr double rel_tol = 1e-12;
  MMatrixReport report;
  bool strict_row = false;
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    double off_sum = 0.0;
    visit_row(i, [&](std::size_t j, double v) {
      if (j == i) {
        diag = v;
        return;
      }
      off_sum += std::abs(v);
      if (v > 0.0)
        report.violations.push_back({MMatrixViolationKind::positive_offdiagonal, i, j, v});
    });
    if (!(diag > 0.0))
      report.violations.push_back({MMatrixViolationKind::nonpositive_diagonal, i, i, diag});
    const double margin = diag - off_sum;
    const double scale = std::max(std::abs(diag), off_sum);
    if (margin < -rel_tol * scale)
      report.violations.push_back({MMatrixViolationKind::not_diagonally_dominant, i, i, margin});
    else if (margin > rel_tol * scale)
      strict_row = true;
  }
  if (!strict_row && n > 0)
    report.violations.push_back({MMatrixViolationKind::no_strictly_dominant_row, 0, 0, 0.0});
  report.is_candidate = report.violations.empty();
  return report;
}

} // namespace detail

/// Sufficient M-matrix test: positive diagonal, non-positive off-diagonals, weak row
/// dominance everywhere and strict dominance in at least one row.
inline MMatrixReport is_m_matrix(const TridiagonalSystem &sys) {
  sys.validate();
  const std::size_t n = sys.size();
  return detail::check_m_matrix(n, [&](std::size_t i, auto &&emit) {
    if (i > 0) emit(i - 1, sys.lower[i - 1]);
    emit(i, sys.diag[i]);
    if (i + 1 < n) emit(i + 1, sys.upper[i]);
  });
}

inline MMatrixReport is_m_matrix(const SparseSystem &sys) {
  const CsrMatrix &a = sys.matrix;
  return detail::check_m_matrix(a.n, [&](std::size_t i, auto &&emit) {
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) emit(a.col[k], a.val[k]);
  });
}

} // namespace convdiff

#pragma once

#include "convdiff/linalg.hpp"
#include "convdiff/mesh.hpp"
#include "convdiff/problems.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace convdiff {

/// Nodal values on a tensor mesh, stored at TensorMesh2D::index(i, j).
struct Grid2DSolution {
  TensorMesh2D mesh;
  std::vector<double> values;
  double relative_residual = 0.0;

  double at(std::size_t i, std::size_t j) const { return values[mesh.index(i, j)]; }

  /// Values along the horizontal grid line y = y_j.
  std::vector<double> row(std::size_t j) const {
    std::vector<double> out(mesh.nx() + 1);
    for (std::size_t i = 0; i <= mesh.nx(); ++i) out[i] = at(i, j);
    return out;
  }

  /// Values along the vertical grid line x = x_i.
  std::vector<double> column(std::size_t i) const {
    std::vector<double> out(mesh.ny() + 1);
    for (std::size_t j = 0; j <= mesh.ny(); ++j) out[j] = at(i, j);
    return out;
  }
};

/// Lexicographic (x fastest) index of interior grid point (i, j), 1 <= i < Nx, 1 <= j < Ny.
inline std::size_t interior_index(const TensorMesh2D &m, std::size_t i, std::size_t j) {
  return (j - 1) * (m.nx() - 1) + (i - 1);
}

/// Five-point upwind scheme: nonuniform central second differences per axis and backward
/// differences for convection. Dirichlet data is eliminated into the right-hand side.
inline SparseSystem assemble_upwind_2d(const ProblemSpec2D &p, const TensorMesh2D &m) {
  if (!(p.b.x >= 0.0 && p.b.y >= 0.0))
    throw std::invalid_argument("upwind 2D scheme needs nonnegative convection components");
  if (!(p.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const std::size_t nx = m.nx();
  const std::size_t ny = m.ny();
  if (nx < 2 || ny < 2) throw std::invalid_argument("need at least one interior grid point");

  const std::size_t n = (nx - 1) * (ny - 1);
  SparseBuilder builder(n);
  std::vector<double> rhs(n, 0.0);
  const double eps = p.eps;
  const double b1 = p.b.x;
  const double b2 = p.b.y;

  for (std::size_t j = 1; j < ny; ++j) {
    const double kl = m.y_mesh.width(j);
    const double kr = m.y_mesh.width(j + 1);
    const double kbar = 0.5 * (kl + kr);
    for (std::size_t i = 1; i < nx; ++i) {
      const double hl = m.x_mesh.width(i);
      const double hr = m.x_mesh.width(i + 1);
      const double hbar = 0.5 * (hl + hr);
      const std::size_t row = interior_index(m, i, j);
      const Point2 pt = m.point(i, j);

      const double west = -eps / (hl * hbar) - b1 / hl;
      const double east = -eps / (hr * hbar);
      const double south = -eps / (kl * kbar) - b2 / kl;
      const double north = -eps / (kr * kbar);
      const double centre = eps / (hl * hbar) + eps / (hr * hbar) + eps / (kl * kbar) +
                            eps / (kr * kbar) + b1 / hl + b2 / kl;

      builder.add(row, row, centre);
      rhs[row] += p.f(pt.x, pt.y);

      const auto couple = [&](std::size_t ii, std::size_t jj, double coef) {
        if (m.is_boundary(ii, jj)) {
          const Point2 q = m.point(ii, jj);
          rhs[row] -= coef * p.g(q.x, q.y);
        } else {
          builder.add(row, interior_index(m, ii, jj), coef);
        }
      };
      couple(i - 1, j, west);
      couple(i + 1, j, east);
      couple(i, j - 1, south);
      couple(i, j + 1, north);
    }
  }
  return {std::move(builder).compress(), std::move(rhs)};
}

inline Grid2DSolution solve_2d(const ProblemSpec2D &p, const TensorMesh2D &m,
                               const SolveOptions &opts = {}) {
  const SparseSystem sys = assemble_upwind_2d(p, m);
  const SparseSolveResult res = solve_sparse(sys, opts);
  Grid2DSolution sol{m, std::vector<double>(m.point_count(), 0.0), res.relative_residual};
  for (std::size_t j = 0; j <= m.ny(); ++j) {
    for (std::size_t i = 0; i <= m.nx(); ++i) {
      const std::size_t idx = m.index(i, j);
      if (m.is_boundary(i, j)) {
        const Point2 q = m.point(i, j);
        sol.values[idx] = p.g(q.x, q.y);
      } else {
        sol.values[idx] = res.values[interior_index(m, i, j)];
      }
    }
  }
  return sol;
}

} // namespace convdiff

#pragma once

#include "convdiff/linalg.hpp"
#include "convdiff/mesh.hpp"
#include "convdiff/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace convdiff {

/// Geometry of a P1 triangle: area, constant basis gradients and diameter.
struct TriangleGeometry {
  std::array<Point2, 3> vertices;
  double area = 0.0;
  std::array<Vec2, 3> grad;
  double diameter = 0.0;

  static TriangleGeometry from_vertices(const std::array<Point2, 3> &v) {
    TriangleGeometry g;
    g.vertices = v;
    const double twice_area = (v[1].x - v[0].x) * (v[2].y - v[0].y) -
                              (v[2].x - v[0].x) * (v[1].y - v[0].y);
    g.area = 0.5 * twice_area;
    if (!(g.area > 0.0)) throw std::invalid_argument("degenerate or clockwise triangle");
    for (std::size_t k = 0; k < 3; ++k) {
      const Point2 &a = v[(k + 1) % 3];
      const Point2 &b = v[(k + 2) % 3];
      g.grad[k] = {(a.y - b.y) / twice_area, (b.x - a.x) / twice_area};
    }
    for (std::size_t k = 0; k < 3; ++k) {
      const Point2 &a = v[k];
      const Point2 &b = v[(k + 1) % 3];
      g.diameter = std::max(g.diameter, std::hypot(b.x - a.x, b.y - a.y));
    }
    return g;
  }
};

struct DeltaStrategy {
  enum class Kind { galerkin_zero, coarse_half_h, user_constant };

  Kind kind = Kind::coarse_half_h;
  double constant = 0.0;

  static DeltaStrategy galerkin() { return {Kind::galerkin_zero, 0.0}; }
  static DeltaStrategy coarse_half_h() { return {Kind::coarse_half_h, 0.0}; }
  static DeltaStrategy user(double c) {
    if (!(c >= 0.0)) throw std::invalid_argument("streamline diffusion constant must be >= 0");
    return {Kind::user_constant, c};
  }
};

inline DeltaStrategy parse_delta_strategy(const std::string &name, double constant = 0.0) {
  if (name == "galerkin_zero" || name == "galerkin") return DeltaStrategy::galerkin();
  if (name == "coarse_half_h") return DeltaStrategy::coarse_half_h();
  if (name == "user_constant") return DeltaStrategy::user(constant);
  throw std::invalid_argument("unknown delta strategy '" + name + "'");
}

inline const char *to_string(DeltaStrategy::Kind k) {
  switch (k) {
  case DeltaStrategy::Kind::galerkin_zero: return "galerkin_zero";
  case DeltaStrategy::Kind::coarse_half_h: return "coarse_half_h";
  case DeltaStrategy::Kind::user_constant: return "user_constant";
  }
  return "?";
}

/// Streamline diffusion parameter for one element. coarse_half_h switches on h_K/2 when the
/// element Peclet number |b| h_K / (2 eps) exceeds one.
inline double choose_delta(const TriangleGeometry &k, double eps, Vec2 b, const DeltaStrategy &s) {
  switch (s.kind) {
  case DeltaStrategy::Kind::galerkin_zero: return 0.0;
  case DeltaStrategy::Kind::coarse_half_h: {
    const double peclet = b.norm() * k.diameter / (2.0 * eps);
    return peclet > 1.0 ? 0.5 * k.diameter : 0.0;
  }
  case DeltaStrategy::Kind::user_constant:
    if (!(s.constant >= 0.0))
      throw std::invalid_argument("streamline diffusion constant must be >= 0");
    return s.constant;
  }
  return 0.0;
}

struct ElementContribution {
  std::array<std::array<double, 3>, 3> matrix{}; ///< matrix[i][j]: test i, trial j
  std::array<double, 3> load{};
};

/// Element matrix and load of the streamline diffusion method with P1 elements. f integrals
/// use the three-vertex quadrature rule.
template <class Source>
ElementContribution local_sdfem(const TriangleGeometry &k, double eps, Vec2 b, double delta,
                                Source &&f) {
  if (!(k.area > 0.0)) throw std::invalid_argument("degenerate triangle");
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
  ElementContribution out;
  std::array<double, 3> bgrad{};
  std::array<double, 3> fv{};
  for (std::size_t i = 0; i < 3; ++i) {
    bgrad[i] = b.dot(k.grad[i]);
    fv[i] = f(k.vertices[i].x, k.vertices[i].y);
  }
  const double third = k.area / 3.0;
  const double f_integral = third * (fv[0] + fv[1] + fv[2]);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      out.matrix[i][j] = eps * k.area * k.grad[i].dot(k.grad[j]) + third * bgrad[j] +
                         delta * k.area * bgrad[i] * bgrad[j];
    }
    out.load[i] = third * fv[i] + delta * bgrad[i] * f_integral;
  }
  return out;
}

/// P1 space with homogeneous Dirichlet conditions: boundary vertices are not unknowns.
class FemSpace {
public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  explicit FemSpace(Triangulation t) : tri_(std::move(t)) {
    if (tri_.boundary.size() != tri_.vertices.size())
      throw std::invalid_argument("boundary flags must cover every vertex");
    unknown_.assign(tri_.vertices.size(), npos);
    for (std::size_t v = 0; v < tri_.vertices.size(); ++v) {
      if (!tri_.boundary[v]) {
        unknown_[v] = free_.size();
        free_.push_back(v);
      }
    }
    geometry_.reserve(tri_.triangles.size());
    for (const auto &t : tri_.triangles)
      geometry_.push_back(TriangleGeometry::from_vertices(
          {tri_.vertices[t[0]], tri_.vertices[t[1]], tri_.vertices[t[2]]}));
  }

  const Triangulation &triangulation() const noexcept { return tri_; }
  const std::vector<std::size_t> &free_vertices() const noexcept { return free_; }
  std::size_t unknown_of(std::size_t vertex) const { return unknown_[vertex]; }
  const TriangleGeometry &geometry(std::size_t t) const { return geometry_[t]; }
  std::size_t dimension() const noexcept { return free_.size(); }

private:
  Triangulation tri_;
  std::vector<std::size_t> free_;
  std::vector<std::size_t> unknown_;
  std::vector<TriangleGeometry> geometry_;
};

/// Global system over the free vertices. Dirichlet data enters through its nodal
/// interpolant on the boundary vertices.
inline SparseSystem assemble_fem(const ProblemSpec2D &p, const FemSpace &space,
                                 const DeltaStrategy &s) {
  if (!(p.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const Triangulation &tri = space.triangulation();
  SparseBuilder builder(space.dimension());
  std::vector<double> rhs(space.dimension(), 0.0);

  std::vector<double> g_boundary(tri.vertices.size(), 0.0);
  for (std::size_t v = 0; v < tri.vertices.size(); ++v)
    if (tri.boundary[v]) g_boundary[v] = p.g(tri.vertices[v].x, tri.vertices[v].y);

  for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
    const TriangleGeometry &geo = space.geometry(t);
    const double delta = choose_delta(geo, p.eps, p.b, s);
    const ElementContribution ec = local_sdfem(geo, p.eps, p.b, delta, p.f);
    const auto &verts = tri.triangles[t];
    for (std::size_t i = 0; i < 3; ++i) {
      const std::size_t row = space.unknown_of(verts[i]);
      if (row == FemSpace::npos) continue;
      rhs[row] += ec.load[i];
      for (std::size_t j = 0; j < 3; ++j) {
        const std::size_t col = space.unknown_of(verts[j]);
        if (col == FemSpace::npos)
          rhs[row] -= ec.matrix[i][j] * g_boundary[verts[j]];
        else
          builder.add(row, col, ec.matrix[i][j]);
      }
    }
  }
  return {std::move(builder).compress(), std::move(rhs)};
}

struct FemSolution {
  std::vector<double> values; ///< one value per triangulation vertex
  double relative_residual = 0.0;
};

inline FemSolution solve_fem(const ProblemSpec2D &p, const Triangulation &t,
                             const DeltaStrategy &s, const SolveOptions &opts = {}) {
  const FemSpace space(t);
  const SparseSystem sys = assemble_fem(p, space, s);
  const SparseSolveResult res = solve_sparse(sys, opts);
  FemSolution sol{std::vector<double>(t.vertices.size(), 0.0), res.relative_residual};
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    const std::size_t u = space.unknown_of(v);
    sol.values[v] = u == FemSpace::npos ? p.g(t.vertices[v].x, t.vertices[v].y) : res.values[u];
  }
  return sol;
}

} // namespace convdiff

#pragma once

// Plain-text exports for plotting and inspection. Numbers are written with 17 significant
// digits so files round-trip exactly.

#include "convdiff/fd1d.hpp"
#include "convdiff/fd2d.hpp"
#include "convdiff/linalg.hpp"
#include "convdiff/mesh.hpp"

#include <cstddef>
#include <cstdio>
#include <array>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace convdiff::io {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One node coordinate per line.
inline void write_mesh_nodes(std::ostream &os, const Mesh1D &m) {
  for (double x : m.nodes()) os << num(x) << '\n';
}

/// "v x y" per vertex, then "t i j k" per triangle with 0-based indices.
inline void write_triangulation(std::ostream &os, const Triangulation &t) {
  for (const auto &v : t.vertices) os << "v " << num(v.x) << ' ' << num(v.y) << '\n';
  for (const auto &tri : t.triangles) os << "t " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
}

/// Inverse of write_triangulation. Boundary flags are recovered from the unit-square edges.
inline Triangulation read_triangulation(std::istream &is) {
  Triangulation t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    char tag = 0;
    ls >> tag;
    if (tag == 'v') {
      Point2 p;
      if (!(ls >> p.x >> p.y)) throw std::runtime_error("malformed vertex line: " + line);
      t.vertices.push_back(p);
      t.boundary.push_back(p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0);
    } else if (tag == 't') {
      std::array<std::size_t, 3> tri{};
      if (!(ls >> tri[0] >> tri[1] >> tri[2])) throw std::runtime_error("malformed triangle line: " + line);
      t.triangles.push_back(tri);
    } else {
      throw std::runtime_error("unknown record: " + line);
    }
  }
  for (const auto &tri : t.triangles)
    for (std::size_t v : tri)
      if (v >= t.vertices.size()) throw std::runtime_error("triangle references a missing vertex");
  return t;
}

/// Coordinate format: "i j value" per stored nonzero, then "rhs i value" per row.
inline void write_system(std::ostream &os, const SparseSystem &sys) {
  const CsrMatrix &a = sys.matrix;
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      os << i << ' ' << a.col[k] << ' ' << num(a.val[k]) << '\n';
  for (std::size_t i = 0; i < sys.rhs.size(); ++i) os << "rhs " << i << ' ' << num(sys.rhs[i]) << '\n';
}

inline void write_system(std::ostream &os, const TridiagonalSystem &sys) {
  write_system(os, to_sparse(sys));
}

/// Two columns "x value".
inline void write_solution(std::ostream &os, const DiscreteSolution1D &sol) {
  for (std::size_t i = 0; i < sol.values.size(); ++i)
    os << num(sol.mesh.node(i)) << ' ' << num(sol.values[i]) << '\n';
}

/// "x y value" triples, x running fastest, a blank line after each grid row.
inline void write_solution(std::ostream &os, const Grid2DSolution &sol) {
  for (std::size_t j = 0; j <= sol.mesh.ny(); ++j) {
    for (std::size_t i = 0; i <= sol.mesh.nx(); ++i) {
      const Point2 p = sol.mesh.point(i, j);
      os << num(p.x) << ' ' << num(p.y) << ' ' << num(sol.at(i, j)) << '\n';
    }
    os << '\n';
  }
}

} // namespace convdiff::io

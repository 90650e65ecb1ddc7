#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace convdiff {

enum class MeshKind { uniform, shishkin, bakhvalov };

inline const char *to_string(MeshKind kind) {
  switch (kind) {
  case MeshKind::uniform: return "uniform";
  case MeshKind::shishkin: return "shishkin";
  case MeshKind::bakhvalov: return "bakhvalov";
  }
  return "?";
}

inline MeshKind parse_mesh_kind(const std::string &name) {
  if (name == "uniform") return MeshKind::uniform;
  if (name == "shishkin") return MeshKind::shishkin;
  if (name == "bakhvalov") return MeshKind::bakhvalov;
  throw std::invalid_argument("unknown mesh kind '" + name + "'");
}

/// Mesh of [0,1] with N intervals. Layer-adapted kinds refine towards x = 1.
class Mesh1D {
public:
  /// Validates nodes[0] = 0, nodes[N] = 1 and strict monotonicity.
  static Mesh1D from_nodes(std::vector<double> nodes, MeshKind kind = MeshKind::uniform,
                           double lambda = 0.0) {
    if (nodes.size() < 2) throw std::invalid_argument("mesh needs at least two nodes");
    if (nodes.front() != 0.0 || nodes.back() != 1.0)
      throw std::invalid_argument("mesh must span [0,1] exactly");
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      if (!(nodes[i] > nodes[i - 1]))
        throw std::invalid_argument("mesh nodes must be strictly increasing (index " +
                                    std::to_string(i) + ")");
    }
    Mesh1D m;
    m.nodes_ = std::move(nodes);
    m.kind_ = kind;
    m.lambda_ = lambda;
    return m;
  }

  const std::vector<double> &nodes() const noexcept { return nodes_; }
  double node(std::size_t i) const { return nodes_[i]; }
  std::size_t intervals() const noexcept { return nodes_.size() - 1; }
  MeshKind kind() const noexcept { return kind_; }
  double lambda() const noexcept { return lambda_; }

  /// Width of interval i, i.e. x_i - x_{i-1}, for 1 <= i <= N.
  double width(std::size_t i) const { return nodes_[i] - nodes_[i - 1]; }

  double min_width() const {
    double w = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < nodes_.size(); ++i) w = std::min(w, width(i));
    return w;
  }

  double max_width() const {
    double w = 0.0;
    for (std::size_t i = 1; i < nodes_.size(); ++i) w = std::max(w, width(i));
    return w;
  }

  bool operator==(const Mesh1D &) const = default;

private:
  Mesh1D() = default;

  std::vector<double> nodes_;
  MeshKind kind_ = MeshKind::uniform;
  double lambda_ = 0.0;
};

inline Mesh1D uniform_mesh_1d(std::size_t N) {
  if (N == 0) throw std::invalid_argument("uniform mesh needs N >= 1");
  std::vector<double> x(N + 1);
  for (std::size_t i = 0; i <= N; ++i) x[i] = static_cast<double>(i) / static_cast<double>(N);
  x[N] = 1.0;
  return Mesh1D::from_nodes(std::move(x), MeshKind::uniform, 0.0);
}

/// Transition-point offset for a layer at x = 1, capped at 1/2.
inline double shishkin_transition(std::size_t N, double eps, double b) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("convection coefficient must be positive");
  if (N < 2) throw std::invalid_argument("Shishkin mesh needs N >= 2");
  return std::min(0.5, 4.0 * eps / b * std::log(static_cast<double>(N)));
}

/// Piecewise-uniform mesh with N/2 intervals on [0, 1-lambda] and N/2 on [1-lambda, 1].
/// The two-mesh estimator calls this directly to keep a coarse mesh's lambda at 2N.
inline Mesh1D shishkin_mesh_with_transition(std::size_t N, double lambda) {
  if (N < 2 || N % 2 != 0) throw std::invalid_argument("Shishkin mesh needs an even N >= 2");
  if (!(lambda > 0.0 && lambda <= 0.5))
    throw std::invalid_argument("Shishkin transition offset must lie in (0, 1/2]");
  const std::size_t half = N / 2;
  const double transition = 1.0 - lambda;
  const double coarse = transition / static_cast<double>(half);
  const double fine = lambda / static_cast<double>(half);
  std::vector<double> x(N + 1);
  for (std::size_t i = 0; i < half; ++i) x[i] = static_cast<double>(i) * coarse;
  x[half] = transition;
  for (std::size_t k = 1; k < half; ++k)
    x[half + k] = transition + static_cast<double>(k) * fine;
  x[N] = 1.0;
  return Mesh1D::from_nodes(std::move(x), MeshKind::shishkin, lambda);
}

inline Mesh1D shishkin_mesh_1d(std::size_t N, double eps, double b) {
  if (N < 2 || N % 2 != 0) throw std::invalid_argument("Shishkin mesh needs an even N >= 2");
  return shishkin_mesh_with_transition(N, shishkin_transition(N, eps, b));
}

struct BakhvalovParams {
  double sigma = 2.0;
  double q = 0.5;
};

/// Point where the logarithmic part of the generating function meets its tangent line
/// through (1, 1). Coordinates are measured from the layer.
struct BakhvalovTangency {
  double tau;      ///< parameter value in (0, q)
  double x_tau;    ///< distance from the layer at which grading stops
  double slope;    ///< derivative of the generating function at tau
  double residual; ///< x_tau + slope * (1 - tau) - 1
};

namespace detail {

// Tangency residual as a function of s = q - tau; s keeps full relative precision
// when tau crowds against q for tiny eps.
inline double bakhvalov_residual(double s, double c, double q) {
  return -c * std::log(s / q) + c * (1.0 - q + s) / s - 1.0;
}

} // namespace detail

/// Empty when the grading constant sigma*eps/b is too large for a tangency point in (0, q).
inline std::optional<BakhvalovTangency> bakhvalov_tangency(double eps, double b,
                                                           const BakhvalovParams &params = {}) {
  const double c = params.sigma * eps / b;
  const double q = params.q;
  if (c >= q) return std::nullopt;

  // R(s) is strictly decreasing on (0, q] with R(q) = c/q - 1 < 0 and R(0+) = +inf.
  double hi = q;
  double lo = q / 2.0;
  while (detail::bakhvalov_residual(lo, c, q) <= 0.0) {
    hi = lo;
    lo /= 2.0;
    if (lo < std::numeric_limits<double>::min())
      return std::nullopt;
  }
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (detail::bakhvalov_residual(mid, c, q) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double r_lo = detail::bakhvalov_residual(lo, c, q);
  const double r_hi = detail::bakhvalov_residual(hi, c, q);
  const double s = std::abs(r_lo) < std::abs(r_hi) ? lo : hi;

  BakhvalovTangency t;
  t.tau = q - s;
  t.x_tau = -c * std::log(s / q);
  t.slope = c / s;
  t.residual = t.x_tau + t.slope * (1.0 - t.tau) - 1.0;
  return t;
}

/// Graded mesh x_i = 1 - chi(1 - i/N), where chi(t) = -(sigma eps/b) ln(1 - t/q) up to the
/// tangency point and continues along its tangent line so that chi(1) = 1.
/// Falls back to a uniform mesh when no tangency point exists.
inline Mesh1D bakhvalov_mesh_1d(std::size_t N, double eps, double b,
                                const BakhvalovParams &params = {}) {
  if (N < 2 || N % 2 != 0) throw std::invalid_argument("Bakhvalov mesh needs an even N >= 2");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("convection coefficient must be positive");
  if (!(params.sigma >= 2.0)) throw std::invalid_argument("Bakhvalov sigma must be >= 2");
  if (!(params.q > 0.0 && params.q < 1.0))
    throw std::invalid_argument("Bakhvalov q must lie in (0,1)");

  const auto tangency = bakhvalov_tangency(eps, b, params);
  if (!tangency) return uniform_mesh_1d(N);

  const double c = params.sigma * eps / b;
  const auto chi = [&](double t) {
    if (t <= tangency->tau) return -c * std::log1p(-t / params.q);
    return tangency->x_tau + tangency->slope * (t - tangency->tau);
  };

  std::vector<double> x(N + 1);
  x[0] = 0.0;
  x[N] = 1.0;
  for (std::size_t i = 1; i < N; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(N);
    x[N - i] = 1.0 - chi(t);
  }
  return Mesh1D::from_nodes(std::move(x), MeshKind::bakhvalov, tangency->x_tau);
}

// ---------------------------------------------------------------------------
// 2D

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2 &) const = default;
};

/// Cartesian product of two 1D meshes. Node (i, j) sits at (x_i, y_j) and is stored at
/// index j * (Nx + 1) + i.
struct TensorMesh2D {
  Mesh1D x_mesh;
  Mesh1D y_mesh;

  std::size_t nx() const noexcept { return x_mesh.intervals(); }
  std::size_t ny() const noexcept { return y_mesh.intervals(); }
  std::size_t point_count() const noexcept { return (nx() + 1) * (ny() + 1); }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * (nx() + 1) + i; }
  Point2 point(std::size_t i, std::size_t j) const { return {x_mesh.node(i), y_mesh.node(j)}; }
  bool is_boundary(std::size_t i, std::size_t j) const noexcept {
    return i == 0 || j == 0 || i == nx() || j == ny();
  }
};

inline TensorMesh2D tensor_shishkin_2d(std::size_t N, double eps, double b1, double b2) {
  return {shishkin_mesh_1d(N, eps, b1), shishkin_mesh_1d(N, eps, b2)};
}

inline TensorMesh2D tensor_uniform_2d(std::size_t N) {
  return {uniform_mesh_1d(N), uniform_mesh_1d(N)};
}

inline TensorMesh2D tensor_bakhvalov_2d(std::size_t N, double eps, double b1, double b2,
                                        const BakhvalovParams &params = {}) {
  return {bakhvalov_mesh_1d(N, eps, b1, params), bakhvalov_mesh_1d(N, eps, b2, params)};
}

struct Triangulation {
  std::vector<Point2> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;
  std::vector<bool> boundary;

  double signed_area(std::size_t t) const {
    const auto &[a, b, c] = triangles[t];
    const Point2 &p = vertices[a], &q = vertices[b], &r = vertices[c];
    return 0.5 * ((q.x - p.x) * (r.y - p.y) - (r.x - p.x) * (q.y - p.y));
  }
};

/// Splits each rectangle along the diagonal from its top-left to its bottom-right corner.
/// Vertex numbering matches TensorMesh2D::index.
inline Triangulation triangulate(const TensorMesh2D &mesh) {
  Triangulation tri;
  const std::size_t nx = mesh.nx();
  const std::size_t ny = mesh.ny();
  tri.vertices.reserve(mesh.point_count());
  tri.boundary.reserve(mesh.point_count());
  for (std::size_t j = 0; j <= ny; ++j) {
    for (std::size_t i = 0; i <= nx; ++i) {
      tri.vertices.push_back(mesh.point(i, j));
      tri.boundary.push_back(mesh.is_boundary(i, j));
    }
  }
  tri.triangles.reserve(2 * nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t bl = mesh.index(i, j);
      const std::size_t br = mesh.index(i + 1, j);
      const std::size_t tl = mesh.index(i, j + 1);
      const std::size_t tr = mesh.index(i + 1, j + 1);
      tri.triangles.push_back({bl, br, tl});
      tri.triangles.push_back({br, tr, tl});
    }
  }
  return tri;
}

} // namespace convdiff

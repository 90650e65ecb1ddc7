#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace convdiff {

using Function1D = std::function<double(double)>;
using Function2D = std::function<double(double, double)>;

/// -eps u'' + b(x) u' = f(x) on (0,1), u(0) = u_left, u(1) = u_right.
struct ProblemSpec1D {
  std::string name;
  double eps = 1.0;
  Function1D b;
  double beta = 1.0; ///< positive lower bound for b on [0,1]
  Function1D f;
  double u_left = 0.0;
  double u_right = 0.0;
  std::optional<Function1D> exact;
};

/// Throws std::invalid_argument if the problem breaks its invariants. b is sampled on
/// 1001 equispaced points.
inline void validate(const ProblemSpec1D &p) {
  if (!(p.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!p.b || !p.f) throw std::invalid_argument("problem needs b and f");
  if (!(p.beta > 0.0)) throw std::invalid_argument("lower bound beta must be positive");
  for (int k = 0; k <= 1000; ++k) {
    const double x = k / 1000.0;
    if (!(p.b(x) >= p.beta))
      throw std::invalid_argument("b(x) drops below beta at x = " + std::to_string(x));
  }
  if (p.exact) {
    if (std::abs((*p.exact)(0.0) - p.u_left) > 1e-12 ||
        std::abs((*p.exact)(1.0) - p.u_right) > 1e-12)
      throw std::invalid_argument("exact solution disagrees with boundary data");
  }
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double dot(const Vec2 &o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2 &) const = default;
};

/// -eps Lap u + b . grad u = f on the unit square, u = g on the boundary.
/// Stored in normalized form: |b| = 1, with eps and f divided by the original |b|
/// (recorded in b_scale). The solution u is unchanged by the normalization.
struct ProblemSpec2D {
  std::string name;
  double eps = 1.0;
  Vec2 b{1.0, 0.0};
  double b_scale = 1.0;
  Function2D f;
  Function2D g;
  std::optional<Function2D> exact;

  /// Convection vector as the caller supplied it.
  Vec2 raw_b() const { return b * b_scale; }
};

inline ProblemSpec2D make_problem_2d(std::string name, double eps, Vec2 b, Function2D f,
                                     Function2D g, std::optional<Function2D> exact = {}) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double scale = b.norm();
  if (!(scale > 0.0)) throw std::invalid_argument("convection vector must be nonzero");
  if (!f || !g) throw std::invalid_argument("problem needs f and g");
  ProblemSpec2D p;
  p.name = std::move(name);
  p.eps = eps / scale;
  p.b = b * (1.0 / scale);
  p.b_scale = scale;
  p.f = [f = std::move(f), scale](double x, double y) { return f(x, y) / scale; };
  p.g = std::move(g);
  p.exact = std::move(exact);
  return p;
}

// ---------------------------------------------------------------------------
// Boundary classification

enum class Edge { left, right, bottom, top };

inline const char *to_string(Edge e) {
  switch (e) {
  case Edge::left: return "left";
  case Edge::right: return "right";
  case Edge::bottom: return "bottom";
  case Edge::top: return "top";
  }
  return "?";
}

inline Vec2 outward_normal(Edge e) {
  switch (e) {
  case Edge::left: return {-1.0, 0.0};
  case Edge::right: return {1.0, 0.0};
  case Edge::bottom: return {0.0, -1.0};
  case Edge::top: return {0.0, 1.0};
  }
  return {};
}

/// Open edges of the unit square grouped by the sign of b . n. Corners belong to no set.
struct BoundaryPartition {
  std::set<Edge> inflow;
  std::set<Edge> outflow;
  std::set<Edge> tangential;
};

inline BoundaryPartition classify_boundary(Vec2 b) {
  if (b.x == 0.0 && b.y == 0.0) throw std::invalid_argument("convection vector must be nonzero");
  BoundaryPartition part;
  for (Edge e : {Edge::left, Edge::right, Edge::bottom, Edge::top}) {
    const double bn = b.dot(outward_normal(e));
    if (std::abs(bn) <= 1e-14)
      part.tangential.insert(e);
    else if (bn < 0.0)
      part.inflow.insert(e);
    else
      part.outflow.insert(e);
  }
  return part;
}

// ---------------------------------------------------------------------------
// Exact solutions. All exponentials take non-positive arguments.

/// 1D layer profile s - (e^{-c(1-s)/eps} - e^{-c/eps}) / (1 - e^{-c/eps}); it solves
/// -eps g'' + c g' = c with g(0) = g(1) = 0.
struct LayerProfile {
  double c;
  double eps;

  double denom() const { return -std::expm1(-c / eps); }
  double layer(double s) const { return std::exp(-c * (1.0 - s) / eps); }

  double value(double s) const { return s - (layer(s) - std::exp(-c / eps)) / denom(); }
  double derivative(double s) const { return 1.0 - (c / eps) * layer(s) / denom(); }
  double second_derivative(double s) const {
    const double k = c / eps;
    return -k * k * layer(s) / denom();
  }
};

/// -eps u'' + u' = 2, u(0) = u(1) = 0.
inline ProblemSpec1D model_problem_p1(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  ProblemSpec1D p;
  p.name = "p1";
  p.eps = eps;
  p.b = [](double) { return 1.0; };
  p.beta = 1.0;
  p.f = [](double) { return 2.0; };
  p.u_left = 0.0;
  p.u_right = 0.0;
  p.exact = [eps](double x) {
    const double e1 = std::exp(-1.0 / eps);
    return 2.0 * x + 2.0 * (e1 - std::exp(-(1.0 - x) / eps)) / -std::expm1(-1.0 / eps);
  };
  return p;
}

struct LayerDecomposition {
  double smooth_part;
  double layer_part;
  double remainder_bound;
};

/// Splits the p1 solution into its reduced solution 2x and the outflow layer term.
inline LayerDecomposition evaluate_layer_decomposition(double eps, double x) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("x must lie in [0,1]");
  return {2.0 * x, -2.0 * std::exp(-(1.0 - x) / eps), std::exp(-1.0 / eps)};
}

/// Product of layer profiles u = g(x; b1) g(y; b2), with layers along x = 1 and y = 1 and
/// homogeneous Dirichlet data.
inline ProblemSpec2D manufactured_2d(double eps, Vec2 b) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(b.x > 0.0 && b.y > 0.0))
    throw std::invalid_argument("manufactured problem needs positive convection components");
  const LayerProfile gx{b.x, eps};
  const LayerProfile gy{b.y, eps};
  // Each factor satisfies -eps g'' + c g' = c, so the product rule collapses the residual to
  // b1 g(y) + b2 g(x).
  auto f = [gx, gy, b](double x, double y) { return b.x * gy.value(y) + b.y * gx.value(x); };
  auto g = [](double, double) { return 0.0; };
  Function2D exact = [gx, gy](double x, double y) { return gx.value(x) * gy.value(y); };
  return make_problem_2d("mms2d", eps, b, f, g, exact);
}

// ---------------------------------------------------------------------------
// Registry

struct ProblemParams {
  double eps = 1e-2;
  double b1 = 1.0;
  double b2 = 1.0;
};

using AnyProblem = std::variant<ProblemSpec1D, ProblemSpec2D>;

inline std::vector<std::string> problem_names() { return {"p1", "mms2d"}; }

inline AnyProblem make_named_problem(std::string_view name, const ProblemParams &params) {
  if (name == "p1") return model_problem_p1(params.eps);
  if (name == "mms2d") return manufactured_2d(params.eps, {params.b1, params.b2});
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

inline bool is_two_dimensional(std::string_view name) { return name == "mms2d"; }

} // namespace convdiff

#include "convdiff/fd1d.hpp"
#include "convdiff/fd2d.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace convdiff;

namespace {

double max_nodal_error(const Grid2DSolution &sol, const Function2D &exact) {
  double e = 0.0;
  for (std::size_t j = 0; j <= sol.mesh.ny(); ++j)
    for (std::size_t i = 0; i <= sol.mesh.nx(); ++i) {
      const Point2 p = sol.mesh.point(i, j);
      e = std::max(e, std::abs(sol.at(i, j) - exact(p.x, p.y)));
    }
  return e;
}

std::size_t interior_oscillations(const std::vector<double> &line) {
  return oscillation_index(std::span<const double>(line).subspan(1, line.size() - 2));
}

} // namespace

TEST(AssembleUpwind2D, SingleUnknownDiagonal) {
  const auto p = make_problem_2d("t", 1.0, {1.0, 0.0}, [](double, double) { return 0.0; },
                                 [](double, double) { return 0.0; });
  const auto sys = assemble_upwind_2d(p, tensor_uniform_2d(2));
  ASSERT_EQ(sys.size(), 1u);
  EXPECT_NEAR(sys.matrix.at(0, 0), 18.0, 1e-12);
}

TEST(AssembleUpwind2D, AtMostFiveNonzerosPerRow) {
  const auto p = manufactured_2d(1e-3, {1.0, 1.0});
  const auto sys = assemble_upwind_2d(p, tensor_shishkin_2d(16, p.eps, p.b.x, p.b.y));
  EXPECT_EQ(sys.size(), 15u * 15u);
  for (std::size_t i = 0; i < sys.size(); ++i) EXPECT_LE(sys.matrix.row_ptr[i + 1] - sys.matrix.row_ptr[i], 5u);
}

TEST(AssembleUpwind2D, ShishkinSystemIsMMatrix) {
  const auto p = manufactured_2d(1e-6, {1.0, 1.0});
  const auto sys = assemble_upwind_2d(p, tensor_shishkin_2d(16, p.eps, p.b.x, p.b.y));
  const auto report = is_m_matrix(sys);
  EXPECT_TRUE(report.is_candidate) << report.violations.size() << " violations";
}

TEST(AssembleUpwind2D, RejectsNegativeConvection) {
  const auto p = make_problem_2d("t", 1.0, {-1.0, 1.0}, [](double, double) { return 0.0; },
                                 [](double, double) { return 0.0; });
  EXPECT_THROW(assemble_upwind_2d(p, tensor_uniform_2d(4)), std::invalid_argument);
}

TEST(Solve2D, HomogeneousProblemGivesZero) {
  const double s = 1.0 / std::sqrt(2.0);
  const auto p = make_problem_2d("t", 1.0, {s, s}, [](double, double) { return 0.0; },
                                 [](double, double) { return 0.0; });
  const auto sol = solve_2d(p, tensor_uniform_2d(4));
  for (double v : sol.values) EXPECT_EQ(v, 0.0);
}

TEST(Solve2D, ReproducesConstants) {
  const auto p = make_problem_2d("t", 1e-4, {1.0, 2.0}, [](double, double) { return 0.0; },
                                 [](double, double) { return 1.0; });
  const auto sol = solve_2d(p, tensor_shishkin_2d(16, p.eps, p.b.x, p.b.y));
  for (double v : sol.values) EXPECT_NEAR(v, 1.0, 1e-10);
}

TEST(Solve2D, ErrorsDecreaseOnShishkinMesh) {
  const auto p = manufactured_2d(1e-6, {1.0, 1.0});
  const auto e16 = max_nodal_error(solve_2d(p, tensor_shishkin_2d(16, p.eps, 1.0, 1.0)), *p.exact);
  const auto e32 = max_nodal_error(solve_2d(p, tensor_shishkin_2d(32, p.eps, 1.0, 1.0)), *p.exact);
  EXPECT_LT(e32, e16);
}

TEST(Solve2D, NoOscillationAlongGridLines) {
  const auto p = manufactured_2d(1e-6, {1.0, 1.0});
  const auto sol = solve_2d(p, tensor_uniform_2d(16));
  for (std::size_t k = 1; k < 16; ++k) {
    EXPECT_EQ(interior_oscillations(sol.row(k)), 0u) << "row " << k;
    EXPECT_EQ(interior_oscillations(sol.column(k)), 0u) << "column " << k;
  }
}

TEST(Solve2D, DiscreteMaximumPrinciple) {
  const auto p = make_problem_2d(
      "t", 1e-5, {0.3, 1.0}, [](double x, double y) { return std::sin(7.0 * x * y) * std::sin(7.0 * x * y); },
      [](double x, double y) { return x * (1.0 - y); });
  const auto sol = solve_2d(p, tensor_shishkin_2d(32, p.eps, p.b.x, p.b.y));
  for (double v : sol.values) EXPECT_GE(v, 0.0);
}

TEST(Solve2D, ErrorIsRobustInEps) {
  double lo = 1e300, hi = 0.0;
  for (double eps : {1e-4, 1e-6, 1e-8}) {
    const auto p = manufactured_2d(eps, {1.0, 1.0});
    const double e = max_nodal_error(solve_2d(p, tensor_shishkin_2d(32, p.eps, 1.0, 1.0)), *p.exact);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  EXPECT_LT(hi, 3.0 * lo);
}

TEST(Solve2D, ReducesToOneDimensionalUpwind) {
  const double eps = 1e-3;
  const std::size_t N = 16;
  const Mesh1D xm = shishkin_mesh_1d(N, eps, 1.0);
  const auto p1 = model_problem_p1(eps);
  const auto u1 = solve_1d(p1, xm, Scheme1D::upwind);
  const auto interp = [&](double x) {
    for (std::size_t i = 1; i <= N; ++i)
      if (x <= xm.node(i)) {
        const double t = (x - xm.node(i - 1)) / xm.width(i);
        return (1.0 - t) * u1.values[i - 1] + t * u1.values[i];
      }
    return u1.values[N];
  };
  const auto p = make_problem_2d("strip", eps, {1.0, 0.0}, [](double, double) { return 2.0; },
                                 [&](double x, double) { return interp(x); });
  const TensorMesh2D m{xm, uniform_mesh_1d(8)};
  const auto sol = solve_2d(p, m);
  for (std::size_t j = 0; j <= 8; ++j)
    for (std::size_t i = 0; i <= N; ++i) EXPECT_NEAR(sol.at(i, j), u1.values[i], 1e-10);
}

TEST(Solve2D, ResidualReported) {
  const auto p = manufactured_2d(1e-2, {1.0, 0.5});
  const auto sol = solve_2d(p, tensor_shishkin_2d(16, p.eps, p.b.x, p.b.y));
  EXPECT_LE(sol.relative_residual, 1e-10);
}

TEST(InteriorIndex, Lexicographic) {
  const auto m = tensor_uniform_2d(4);
  EXPECT_EQ(interior_index(m, 1, 1), 0u);
  EXPECT_EQ(interior_index(m, 3, 1), 2u);
  EXPECT_EQ(interior_index(m, 1, 2), 3u);
  EXPECT_EQ(interior_index(m, 3, 3), 8u);
}

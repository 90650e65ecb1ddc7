#include "convdiff/fd1d.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace convdiff;

namespace {

ProblemSpec1D with_eps(ProblemSpec1D p, double eps) {
  p.eps = eps;
  p.exact.reset();
  return p;
}

} // namespace

TEST(Assemble1D, CentralRow) {
  const auto sys = assemble_1d(model_problem_p1(1.0), uniform_mesh_1d(4), Scheme1D::central);
  EXPECT_NEAR(sys.lower[0], -18.0, 1e-12);
  EXPECT_NEAR(sys.diag[1], 32.0, 1e-12);
  EXPECT_NEAR(sys.upper[1], -14.0, 1e-12);
}

TEST(Assemble1D, UpwindRow) {
  const auto sys = assemble_1d(model_problem_p1(1.0), uniform_mesh_1d(4), Scheme1D::upwind);
  EXPECT_NEAR(sys.lower[0], -20.0, 1e-12);
  EXPECT_NEAR(sys.diag[1], 36.0, 1e-12);
  EXPECT_NEAR(sys.upper[1], -16.0, 1e-12);
}

TEST(Assemble1D, BoundaryValuesMoveToRhs) {
  auto p = model_problem_p1(1.0);
  p.exact.reset();
  p.u_left = 1.0;
  p.u_right = 3.0;
  const auto sys = assemble_1d(p, uniform_mesh_1d(4), Scheme1D::central);
  EXPECT_NEAR(sys.rhs[0], 2.0 + 18.0, 1e-12);
  EXPECT_NEAR(sys.rhs[1], 2.0, 1e-12);
  EXPECT_NEAR(sys.rhs[2], 2.0 + 3.0 * 14.0, 1e-12);
}

TEST(Assemble1D, IlinApproachesCentralForSmallRho) {
  // Entries grow like eps/h^2, so compare relative to the row scale.
  auto p = model_problem_p1(1e6);
  p.exact.reset();
  const auto il = assemble_1d(p, uniform_mesh_1d(8), Scheme1D::ilin);
  const auto ce = assemble_1d(p, uniform_mesh_1d(8), Scheme1D::central);
  const double scale = ce.matrix_max_norm();
  for (std::size_t k = 0; k < ce.diag.size(); ++k) EXPECT_LE(std::abs(il.diag[k] - ce.diag[k]), 1e-10 * scale);
  for (std::size_t k = 0; k < ce.upper.size(); ++k) {
    EXPECT_LE(std::abs(il.upper[k] - ce.upper[k]), 1e-10 * scale);
    EXPECT_LE(std::abs(il.lower[k] - ce.lower[k]), 1e-10 * scale);
  }
}

TEST(Assemble1D, IlinRejectsNonuniformMesh) {
  EXPECT_THROW(assemble_1d(model_problem_p1(1e-3), shishkin_mesh_1d(16, 1e-3, 1.0), Scheme1D::ilin),
               std::invalid_argument);
  EXPECT_NO_THROW(assemble_1d(model_problem_p1(1.0), shishkin_mesh_1d(16, 1.0, 1.0), Scheme1D::ilin));
}

TEST(Assemble1D, NonuniformRowsAnnihilateLinearFunctions) {
  // Both stencils reproduce u = a + c x exactly, so A u_interior + boundary terms = b c.
  const auto m = shishkin_mesh_1d(16, 1e-3, 1.0);
  auto p = model_problem_p1(1e-3);
  p.exact.reset();
  p.f = [](double) { return 0.0; };
  p.u_left = 0.5;
  p.u_right = 2.5;
  for (Scheme1D s : {Scheme1D::central, Scheme1D::upwind}) {
    const auto sys = assemble_1d(p, m, s);
    std::vector<double> u;
    for (std::size_t i = 1; i < m.intervals(); ++i) u.push_back(0.5 + 2.0 * m.node(i));
    const auto au = sys.apply(u);
    for (std::size_t k = 0; k < au.size(); ++k) EXPECT_NEAR(au[k] - sys.rhs[k], 2.0, 1e-7 * sys.matrix_max_norm());
  }
}

TEST(FittingFactor, Examples) {
  EXPECT_NEAR(fitting_factor(1e-8), 1.0, 1e-15);
  EXPECT_NEAR(fitting_factor(1.0), 1.31303528549933, 1e-13);
  EXPECT_LT(std::abs(fitting_factor(50.0) - 50.0) / 50.0, 1e-15);
  EXPECT_THROW(fitting_factor(0.0), std::invalid_argument);
  EXPECT_THROW(fitting_factor(-1.0), std::invalid_argument);
}

TEST(FittingFactor, ContinuousAcrossSeriesBranch) {
  const double below = fitting_factor(std::nextafter(1e-4, 0.0));
  const double above = fitting_factor(1e-4);
  EXPECT_NEAR(below, above, 1e-15);
  double prev = 1.0;
  for (double rho = 1e-6; rho < 100.0; rho *= 1.1) {
    const double s = fitting_factor(rho);
    EXPECT_GE(s, prev);
    EXPECT_GE(s, 1.0);
    EXPECT_GE(s, rho);
    prev = s;
  }
}

TEST(EquivalentDiffusion, Examples) {
  EXPECT_NEAR(equivalent_diffusion(1e-6, 0.1), 0.050001, 1e-15);
  EXPECT_EQ(equivalent_diffusion(0.3, 0.0), 0.3);
}

TEST(EquivalentDiffusion, UpwindEqualsCentralWithAddedDiffusion) {
  const double eps = 1e-6;
  const std::size_t N = 32;
  const double h = 1.0 / N;
  const auto m = uniform_mesh_1d(N);
  const auto p = model_problem_p1(eps);
  const auto up = assemble_1d(p, m, Scheme1D::upwind);
  const auto ce = assemble_1d(with_eps(p, equivalent_diffusion(eps, h)), m, Scheme1D::central);
  for (std::size_t k = 0; k < up.diag.size(); ++k) {
    EXPECT_NEAR(up.diag[k], ce.diag[k], 1e-14 * std::abs(ce.diag[k]));
    EXPECT_NEAR(up.rhs[k], ce.rhs[k], 1e-14);
  }
  for (std::size_t k = 0; k < up.upper.size(); ++k) {
    EXPECT_NEAR(up.upper[k], ce.upper[k], 1e-14 * std::abs(ce.diag[k]));
    EXPECT_NEAR(up.lower[k], ce.lower[k], 1e-14 * std::abs(ce.diag[k]));
  }
}

TEST(Solve1D, HomogeneousProblemGivesZero) {
  auto p = model_problem_p1(0.01);
  p.f = [](double) { return 0.0; };
  for (Scheme1D s : {Scheme1D::central, Scheme1D::upwind, Scheme1D::ilin}) {
    const auto sol = solve_1d(p, uniform_mesh_1d(16), s);
    for (double v : sol.values) EXPECT_EQ(v, 0.0);
  }
}

TEST(Solve1D, IlinIsNodallyExact) {
  for (double eps : {1.0, 0.1, 0.01, 1e-4, 1e-8}) {
    const auto p = model_problem_p1(eps);
    for (std::size_t N : {8u, 16u, 32u}) {
      const auto sol = solve_1d(p, uniform_mesh_1d(N), Scheme1D::ilin);
      for (std::size_t i = 0; i <= N; ++i)
        EXPECT_NEAR(sol.values[i], (*p.exact)(sol.mesh.node(i)), 1e-10) << "eps=" << eps << " N=" << N;
    }
  }
}

TEST(Solve1D, IlinNodallyExactForOtherConstantCoefficients) {
  ProblemSpec1D p;
  p.name = "const";
  p.eps = 0.02;
  p.b = [](double) { return 3.0; };
  p.beta = 3.0;
  p.f = [](double) { return 0.0; };
  p.u_left = 1.0;
  p.u_right = -1.0;
  // u = A + B e^{-3(1-x)/eps}
  const double e = std::exp(-3.0 / p.eps);
  const double B = -2.0 / (1.0 - e);
  const double A = 1.0 - B * e;
  const auto sol = solve_1d(p, uniform_mesh_1d(10), Scheme1D::ilin);
  for (std::size_t i = 0; i <= 10; ++i) {
    const double x = sol.mesh.node(i);
    EXPECT_NEAR(sol.values[i], A + B * std::exp(-3.0 * (1.0 - x) / p.eps), 1e-10);
  }
}

TEST(Solve1D, UpwindMonotone) {
  const auto sol = solve_1d(model_problem_p1(1e-6), uniform_mesh_1d(16), Scheme1D::upwind);
  EXPECT_EQ(oscillation_index(sol), 0u);
  for (std::size_t i = 1; i < 16; ++i) EXPECT_GE(sol.values[i], sol.values[i - 1]);
  // The full sequence still turns once, at the boundary layer.
  EXPECT_EQ(oscillation_index(std::span<const double>(sol.values)), 1u);
}

TEST(Solve1D, CentralOscillates) {
  const auto sol = solve_1d(model_problem_p1(1e-6), uniform_mesh_1d(16), Scheme1D::central);
  EXPECT_GE(oscillation_index(sol), 1u);
}

TEST(Solve1D, UpwindSmearsLayer) {
  const auto p = model_problem_p1(1e-6);
  const auto up = solve_1d(p, uniform_mesh_1d(16), Scheme1D::upwind);
  const auto il = solve_1d(p, uniform_mesh_1d(16), Scheme1D::ilin);
  EXPECT_LT(up.values[15], il.values[15]);
}

TEST(Solve1D, NonnegativeWhenMMatrix) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double eps = std::pow(10.0, -6.0 * u(rng));
    const double c0 = u(rng);
    const double c1 = u(rng);
    ProblemSpec1D p;
    p.eps = eps;
    p.b = [](double x) { return 1.0 + x * x; };
    p.beta = 1.0;
    p.f = [c0, c1](double x) { return c0 + c1 * std::sin(3.0 * x) * std::sin(3.0 * x); };
    p.u_left = u(rng);
    p.u_right = u(rng);
    for (Scheme1D s : {Scheme1D::central, Scheme1D::upwind}) {
      const auto m = shishkin_mesh_1d(32, eps, 1.0);
      if (!is_m_matrix(assemble_1d(p, m, s)).is_candidate) continue;
      for (double v : solve_1d(p, m, s).values) EXPECT_GE(v, 0.0);
    }
  }
}

TEST(OscillationIndex, Examples) {
  const std::vector<double> inc{0.0, 0.1, 0.3, 0.7, 1.0};
  EXPECT_EQ(oscillation_index(inc), 0u);
  std::vector<double> alt;
  for (int i = 0; i <= 10; ++i) alt.push_back(i % 2);
  EXPECT_EQ(oscillation_index(alt), 9u);
  const std::vector<double> flat{0.0, 1.0, 1.0 + 1e-15, 2.0};
  EXPECT_EQ(oscillation_index(flat), 0u);
}

TEST(OscillationIndex, RequiresTwoIntervals) {
  const DiscreteSolution1D sol{uniform_mesh_1d(1), {0.0, 1.0}};
  EXPECT_THROW(oscillation_index(sol), std::invalid_argument);
}

TEST(Scheme1D, NamesRoundTrip) {
  for (Scheme1D s : {Scheme1D::central, Scheme1D::upwind, Scheme1D::ilin})
    EXPECT_EQ(parse_scheme_1d(to_string(s)), s);
  EXPECT_THROW(parse_scheme_1d("galerkin"), std::invalid_argument);
}

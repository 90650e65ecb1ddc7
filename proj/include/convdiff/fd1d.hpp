#pragma once

#include "convdiff/linalg.hpp"
#include "convdiff/mesh.hpp"
#include "convdiff/problems.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace convdiff {

enum class Scheme1D { central, upwind, ilin };

inline const char *to_string(Scheme1D s) {
  switch (s) {
  case Scheme1D::central: return "central";
  case Scheme1D::upwind: return "upwind";
  case Scheme1D::ilin: return "ilin";
  }
  return "?";
}

inline Scheme1D parse_scheme_1d(const std::string &name) {
  if (name == "central") return Scheme1D::central;
  if (name == "upwind") return Scheme1D::upwind;
  if (name == "ilin") return Scheme1D::ilin;
  throw std::invalid_argument("unknown 1D scheme '" + name + "'");
}

/// rho coth(rho): the diffusion multiplier that makes the central scheme nodally exact for
/// constant coefficients. Uses the series 1 + rho^2/3 below 1e-4.
inline double fitting_factor(double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("fitting factor needs rho > 0");
  if (rho < 1e-4) return 1.0 + rho * rho / 3.0;
  return rho / std::tanh(rho);
}

/// Diffusion seen by central differencing when upwinding is used on a uniform mesh of width h.
inline double equivalent_diffusion(double eps, double h) {
  if (h < 0.0) throw std::invalid_argument("mesh width must be nonnegative");
  return eps + 0.5 * h;
}

namespace detail {

inline bool is_uniform(const Mesh1D &m) {
  const double h = 1.0 / static_cast<double>(m.intervals());
  for (std::size_t i = 1; i <= m.intervals(); ++i)
    if (std::abs(m.width(i) - h) > 1e-12 * h) return false;
  return true;
}

} // namespace detail

/// Tridiagonal system for the interior unknowns u_1..u_{N-1}; boundary values are moved to
/// the right-hand side.
inline TridiagonalSystem assemble_1d(const ProblemSpec1D &p, const Mesh1D &m, Scheme1D s) {
  validate(p);
  const std::size_t N = m.intervals();
  if (N < 2) throw std::invalid_argument("need at least one interior node");
  if (s == Scheme1D::ilin && !detail::is_uniform(m))
    throw std::invalid_argument("Il'in scheme requires a uniform mesh");

  const std::size_t n = N - 1;
  TridiagonalSystem sys;
  sys.lower.assign(n - 1, 0.0);
  sys.diag.assign(n, 0.0);
  sys.upper.assign(n - 1, 0.0);
  sys.rhs.assign(n, 0.0);

  for (std::size_t i = 1; i < N; ++i) {
    const double x = m.node(i);
    const double hl = m.width(i);
    const double hr = m.width(i + 1);
    const double hbar = 0.5 * (hl + hr);
    const double bi = p.b(x);

    double sigma = 1.0;
    if (s == Scheme1D::ilin) sigma = fitting_factor(bi * hl / (2.0 * p.eps));
    const double diff = p.eps * sigma;

    double lo = -diff / (hl * hbar);
    double up = -diff / (hr * hbar);
    double di = diff / (hl * hbar) + diff / (hr * hbar);
    if (s == Scheme1D::upwind) {
      lo -= bi / hl;
      di += bi / hl;
    } else {
      lo -= bi / (hl + hr);
      up += bi / (hl + hr);
    }

    const std::size_t k = i - 1;
    sys.diag[k] = di;
    sys.rhs[k] = p.f(x);
    if (i == 1)
      sys.rhs[k] -= lo * p.u_left;
    else
      sys.lower[k - 1] = lo;
    if (i == N - 1)
      sys.rhs[k] -= up * p.u_right;
    else
      sys.upper[k] = up;
  }
  return sys;
}

struct DiscreteSolution1D {
  Mesh1D mesh;
  std::vector<double> values; ///< N+1 nodal values, boundary values included
};

inline DiscreteSolution1D solve_1d(const ProblemSpec1D &p, const Mesh1D &m, Scheme1D s) {
  const TridiagonalSystem sys = assemble_1d(p, m, s);
  const std::vector<double> interior = solve_tridiagonal(sys);
  DiscreteSolution1D sol{m, {}};
  sol.values.reserve(m.intervals() + 1);
  sol.values.push_back(p.u_left);
  sol.values.insert(sol.values.end(), interior.begin(), interior.end());
  sol.values.push_back(p.u_right);
  return sol;
}

/// Sign changes in consecutive differences, skipping differences below 1e-13.
inline std::size_t oscillation_index(std::span<const double> values) {
  constexpr double threshold = 1e-13;
  std::size_t changes = 0;
  int last_sign = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    if (std::abs(d) < threshold) continue;
    const int sign = d > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++changes;
    last_sign = sign;
  }
  return changes;
}

/// Counts over the computed interior values; the Dirichlet data at either end is excluded so
/// that a resolved boundary layer does not register as an oscillation.
inline std::size_t oscillation_index(const DiscreteSolution1D &sol) {
  if (sol.mesh.intervals() < 2) throw std::invalid_argument("oscillation index needs N >= 2");
  const std::span<const double> all(sol.values);
  return oscillation_index(all.subspan(1, all.size() - 2));
}

} // namespace convdiff

#pragma once

#include "convdiff/fd1d.hpp"
#include "convdiff/fd2d.hpp"
#include "convdiff/fem2d.hpp"
#include "convdiff/linalg.hpp"
#include "convdiff/mesh.hpp"
#include "convdiff/problems.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace convdiff {

// ---------------------------------------------------------------------------
// Error norms

inline double nodal_max_error(std::span<const double> computed, std::span<const double> exact) {
  if (computed.size() != exact.size()) throw std::invalid_argument("length mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < computed.size(); ++i) e = std::max(e, std::abs(computed[i] - exact[i]));
  return e;
}

namespace detail {

[[noreturn]] inline void missing_oracle() {
  throw std::invalid_argument("problem has no exact solution; use the two-mesh error mode");
}

} // namespace detail

inline double nodal_max_error(const DiscreteSolution1D &sol, const std::optional<Function1D> &exact) {
  if (!exact) detail::missing_oracle();
  double e = 0.0;
  for (std::size_t i = 0; i < sol.values.size(); ++i)
    e = std::max(e, std::abs(sol.values[i] - (*exact)(sol.mesh.node(i))));
  return e;
}

/// Axis-aligned box used to restrict 2D error measurement, bounds inclusive.
struct Box {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

  bool contains(double x, double y) const {
    constexpr double slack = 1e-12;
    return x >= x0 - slack && x <= x1 + slack && y >= y0 - slack && y <= y1 + slack;
  }
};

inline double nodal_max_error(const Grid2DSolution &sol, const std::optional<Function2D> &exact,
                              const Box &region = {}) {
  if (!exact) detail::missing_oracle();
  double e = 0.0;
  for (std::size_t j = 0; j <= sol.mesh.ny(); ++j) {
    for (std::size_t i = 0; i <= sol.mesh.nx(); ++i) {
      const Point2 q = sol.mesh.point(i, j);
      if (!region.contains(q.x, q.y)) continue;
      e = std::max(e, std::abs(sol.at(i, j) - (*exact)(q.x, q.y)));
    }
  }
  return e;
}

/// Trapezoidal (mass-lumped) nodal weights of a 1D mesh.
inline std::vector<double> lumped_weights(const Mesh1D &m) {
  const std::size_t N = m.intervals();
  std::vector<double> w(N + 1, 0.0);
  for (std::size_t i = 1; i <= N; ++i) {
    w[i - 1] += 0.5 * m.width(i);
    w[i] += 0.5 * m.width(i);
  }
  return w;
}

inline double discrete_l2_error(const DiscreteSolution1D &sol, const std::optional<Function1D> &exact) {
  if (!exact) detail::missing_oracle();
  const std::vector<double> w = lumped_weights(sol.mesh);
  double s = 0.0;
  for (std::size_t i = 0; i < sol.values.size(); ++i) {
    const double d = sol.values[i] - (*exact)(sol.mesh.node(i));
    s += w[i] * d * d;
  }
  return std::sqrt(s);
}

inline double discrete_l2_error(const Grid2DSolution &sol, const std::optional<Function2D> &exact,
                                const Box &region = {}) {
  if (!exact) detail::missing_oracle();
  const std::vector<double> wx = lumped_weights(sol.mesh.x_mesh);
  const std::vector<double> wy = lumped_weights(sol.mesh.y_mesh);
  double s = 0.0;
  for (std::size_t j = 0; j <= sol.mesh.ny(); ++j) {
    for (std::size_t i = 0; i <= sol.mesh.nx(); ++i) {
      const Point2 q = sol.mesh.point(i, j);
      if (!region.contains(q.x, q.y)) continue;
      const double d = sol.at(i, j) - (*exact)(q.x, q.y);
      s += wx[i] * wy[j] * d * d;
    }
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Two-mesh (double-mesh) differences

/// For each node of `coarse`, the index of the coinciding node of `fine`.
/// Throws std::invalid_argument when the meshes are not nested.
inline std::vector<std::size_t> shared_node_map(const Mesh1D &coarse, const Mesh1D &fine) {
  constexpr double tol = 1e-13;
  std::vector<std::size_t> map;
  map.reserve(coarse.intervals() + 1);
  std::size_t k = 0;
  for (double x : coarse.nodes()) {
    while (k < fine.nodes().size() && fine.node(k) < x - tol) ++k;
    if (k == fine.nodes().size() || std::abs(fine.node(k) - x) > tol)
      throw std::invalid_argument("meshes are not nested: no fine node at x = " + std::to_string(x));
    map.push_back(k);
  }
  return map;
}

inline double two_mesh_error(const DiscreteSolution1D &coarse, const DiscreteSolution1D &fine) {
  const std::vector<std::size_t> map = shared_node_map(coarse.mesh, fine.mesh);
  double e = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i)
    e = std::max(e, std::abs(coarse.values[i] - fine.values[map[i]]));
  return e;
}

inline double two_mesh_error(const Grid2DSolution &coarse, const Grid2DSolution &fine,
                             const Box &region = {}) {
  const auto mx = shared_node_map(coarse.mesh.x_mesh, fine.mesh.x_mesh);
  const auto my = shared_node_map(coarse.mesh.y_mesh, fine.mesh.y_mesh);
  double e = 0.0;
  for (std::size_t j = 0; j < my.size(); ++j) {
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const Point2 q = coarse.mesh.point(i, j);
      if (!region.contains(q.x, q.y)) continue;
      e = std::max(e, std::abs(coarse.at(i, j) - fine.at(mx[i], my[j])));
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Rates

enum class RateModel { plain, log_adjusted };

/// Exponent p in e ~ C N^{-p} (plain) or e ~ C (N^{-1} ln N)^p (log_adjusted), estimated from
/// errors at two mesh sizes. Empty when either error is not positive.
inline std::optional<double> rate_between(double e1, double e2, std::size_t N1, std::size_t N2,
                                          RateModel model) {
  if (!(e1 > 0.0 && e2 > 0.0) || N1 == 0 || N2 <= N1) return std::nullopt;
  const double n1 = static_cast<double>(N1);
  const double n2 = static_cast<double>(N2);
  const double num = std::log(e1 / e2);
  if (model == RateModel::plain) return num / std::log(n2 / n1);
  if (N1 < 2) return std::nullopt;
  return num / std::log((std::log(n1) / n1) / (std::log(n2) / n2));
}

inline std::optional<double> convergence_rate(double e_N, double e_2N, std::size_t N, RateModel model) {
  return rate_between(e_N, e_2N, N, 2 * N, model);
}

// ---------------------------------------------------------------------------
// Experiment configuration

enum class Scheme { central, upwind, ilin, fd2d_upwind, fem_galerkin, fem_sdfem };

inline const char *to_string(Scheme s) {
  switch (s) {
  case Scheme::central: return "central";
  case Scheme::upwind: return "upwind";
  case Scheme::ilin: return "ilin";
  case Scheme::fd2d_upwind: return "fd2d-upwind";
  case Scheme::fem_galerkin: return "fem-galerkin";
  case Scheme::fem_sdfem: return "fem-sdfem";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string &name) {
  for (Scheme s : {Scheme::central, Scheme::upwind, Scheme::ilin, Scheme::fd2d_upwind,
                   Scheme::fem_galerkin, Scheme::fem_sdfem})
    if (name == to_string(s)) return s;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

inline bool is_two_dimensional(Scheme s) {
  return s == Scheme::fd2d_upwind || s == Scheme::fem_galerkin || s == Scheme::fem_sdfem;
}

enum class NormKind { nodal_max, discrete_l2 };
enum class ErrorMode { exact, two_mesh };

/// One discretization of one named problem; eps and N are supplied per run.
struct RunSpec {
  std::string problem = "p1";
  ProblemParams params;
  Scheme scheme = Scheme::upwind;
  MeshKind mesh = MeshKind::uniform;
  DeltaStrategy delta = DeltaStrategy::coarse_half_h();
  BakhvalovParams bakhvalov;
  SolveOptions solver;
};

struct ExperimentConfig {
  RunSpec run;
  std::vector<std::size_t> N;
  std::vector<double> eps;
  NormKind norm = NormKind::nodal_max;
  ErrorMode error = ErrorMode::exact;
  Box region;
  std::string output;
  unsigned threads = 1;

  void validate() const {
    if (N.empty() || eps.empty()) throw std::invalid_argument("N and eps lists must be nonempty");
    for (std::size_t k = 0; k < N.size(); ++k) {
      if (N[k] < 2) throw std::invalid_argument("every N must be >= 2");
      if (k > 0 && N[k] <= N[k - 1]) throw std::invalid_argument("N values must be increasing");
      if (run.mesh != MeshKind::uniform && N[k] % 2 != 0)
        throw std::invalid_argument("layer-adapted meshes need even N");
    }
    for (double e : eps)
      if (!(e > 0.0)) throw std::invalid_argument("eps values must be positive");
    if (is_two_dimensional(run.scheme) != is_two_dimensional(run.problem))
      throw std::invalid_argument("scheme '" + std::string(to_string(run.scheme)) +
                                  "' does not apply to problem '" + run.problem + "'");
    if (run.scheme == Scheme::ilin && run.mesh != MeshKind::uniform)
      throw std::invalid_argument("ilin requires the uniform mesh");
  }
};

namespace detail {

template <class T>
T json_or(const nlohmann::json &j, const char *key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

inline void apply_run_fields(const nlohmann::json &j, RunSpec &run) {
  if (j.contains("problem")) {
    const auto &p = j.at("problem");
    if (p.is_string()) {
      run.problem = p.get<std::string>();
    } else {
      run.problem = p.at("name").get<std::string>();
      run.params.b1 = json_or(p, "b1", run.params.b1);
      run.params.b2 = json_or(p, "b2", run.params.b2);
    }
  }
  if (j.contains("scheme")) run.scheme = parse_scheme(j.at("scheme").get<std::string>());
  if (j.contains("mesh")) run.mesh = parse_mesh_kind(j.at("mesh").get<std::string>());
  if (j.contains("delta")) {
    const auto &d = j.at("delta");
    if (d.is_string())
      run.delta = parse_delta_strategy(d.get<std::string>());
    else
      run.delta = parse_delta_strategy(d.at("strategy").get<std::string>(), json_or(d, "constant", 0.0));
  }
  if (j.contains("bakhvalov")) {
    const auto &b = j.at("bakhvalov");
    run.bakhvalov.sigma = json_or(b, "sigma", run.bakhvalov.sigma);
    run.bakhvalov.q = json_or(b, "q", run.bakhvalov.q);
  }
  if (j.contains("solver_tol")) run.solver.tol = j.at("solver_tol").get<double>();
}

} // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json &j) {
  ExperimentConfig cfg;
  detail::apply_run_fields(j, cfg.run);
  cfg.N = j.at("N").get<std::vector<std::size_t>>();
  cfg.eps = j.at("eps").get<std::vector<double>>();
  if (j.contains("norm")) {
    const auto n = j.at("norm").get<std::string>();
    if (n == "nodal_max")
      cfg.norm = NormKind::nodal_max;
    else if (n == "discrete_l2")
      cfg.norm = NormKind::discrete_l2;
    else
      throw std::invalid_argument("unknown norm '" + n + "'");
  }
  if (j.contains("error")) {
    const auto e = j.at("error").get<std::string>();
    if (e == "exact")
      cfg.error = ErrorMode::exact;
    else if (e == "two_mesh")
      cfg.error = ErrorMode::two_mesh;
    else
      throw std::invalid_argument("unknown error mode '" + e + "'");
  }
  if (j.contains("subdomain")) {
    const auto b = j.at("subdomain").get<std::vector<double>>();
    if (b.size() != 4) throw std::invalid_argument("subdomain needs [x0, x1, y0, y1]");
    cfg.region = {b[0], b[1], b[2], b[3]};
  }
  cfg.output = detail::json_or<std::string>(j, "output", "");
  cfg.threads = detail::json_or(j, "threads", 1u);
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Running discretizations

using AnySolution = std::variant<DiscreteSolution1D, Grid2DSolution>;

/// Transition offsets forced onto layer-adapted meshes (used to nest two-mesh pairs).
struct LambdaOverride {
  double x = 0.0;
  double y = 0.0;
};

namespace detail {

inline Mesh1D build_mesh_1d(MeshKind kind, std::size_t N, double eps, double b,
                            const BakhvalovParams &bp, std::optional<double> lambda) {
  switch (kind) {
  case MeshKind::uniform: return uniform_mesh_1d(N);
  case MeshKind::shishkin:
    return lambda ? shishkin_mesh_with_transition(N, *lambda) : shishkin_mesh_1d(N, eps, b);
  case MeshKind::bakhvalov: return bakhvalov_mesh_1d(N, eps, b, bp);
  }
  throw std::invalid_argument("unknown mesh kind");
}

inline Scheme1D scheme_1d(Scheme s) {
  switch (s) {
  case Scheme::central: return Scheme1D::central;
  case Scheme::upwind: return Scheme1D::upwind;
  case Scheme::ilin: return Scheme1D::ilin;
  default: throw std::invalid_argument("not a 1D scheme");
  }
}

} // namespace detail

inline TensorMesh2D build_tensor_mesh(const RunSpec &spec, const ProblemSpec2D &p, std::size_t N,
                                      std::optional<LambdaOverride> lambda = {}) {
  const auto axis = [&](double b, std::optional<double> lam) {
    return detail::build_mesh_1d(spec.mesh, N, p.eps, b, spec.bakhvalov, lam);
  };
  if (lambda) return {axis(p.b.x, lambda->x), axis(p.b.y, lambda->y)};
  return {axis(p.b.x, std::nullopt), axis(p.b.y, std::nullopt)};
}

inline Mesh1D build_mesh(const RunSpec &spec, const ProblemSpec1D &p, std::size_t N,
                         std::optional<double> lambda = {}) {
  return detail::build_mesh_1d(spec.mesh, N, p.eps, p.beta, spec.bakhvalov, lambda);
}

/// Builds the problem for one eps, meshes it with N intervals and solves.
inline AnySolution solve_configured(const RunSpec &spec, const AnyProblem &problem, std::size_t N,
                                    std::optional<LambdaOverride> lambda = {}) {
  if (const auto *p1 = std::get_if<ProblemSpec1D>(&problem)) {
    const std::optional<double> lam = lambda ? std::optional<double>(lambda->x) : std::nullopt;
    return solve_1d(*p1, build_mesh(spec, *p1, N, lam), detail::scheme_1d(spec.scheme));
  }
  const auto &p2 = std::get<ProblemSpec2D>(problem);
  const TensorMesh2D mesh = build_tensor_mesh(spec, p2, N, lambda);
  if (spec.scheme == Scheme::fd2d_upwind) return solve_2d(p2, mesh, spec.solver);
  if (spec.scheme != Scheme::fem_galerkin && spec.scheme != Scheme::fem_sdfem)
    throw std::invalid_argument("scheme does not apply to a 2D problem");
  const DeltaStrategy delta =
      spec.scheme == Scheme::fem_galerkin ? DeltaStrategy::galerkin() : spec.delta;
  const FemSolution fem = solve_fem(p2, triangulate(mesh), delta, spec.solver);
  return Grid2DSolution{mesh, fem.values, fem.relative_residual};
}

inline AnySolution solve_configured(const RunSpec &spec, std::size_t N, double eps) {
  ProblemParams params = spec.params;
  params.eps = eps;
  return solve_configured(spec, make_named_problem(spec.problem, params), N);
}

// ---------------------------------------------------------------------------
// Convergence tables

struct ConvergenceRow {
  double eps = 0.0;
  std::size_t N = 0;
  std::optional<double> error;
  std::optional<double> rate_plain;
  std::optional<double> rate_log_adjusted;
  std::optional<std::string> failure;
};

struct ConvergenceTable {
  std::string problem;
  std::string scheme;
  std::string mesh;
  std::string norm;
  std::string error_mode;
  std::vector<ConvergenceRow> rows; ///< grouped by eps in config order, N increasing

  std::vector<const ConvergenceRow *> rows_for(double eps) const {
    std::vector<const ConvergenceRow *> out;
    for (const auto &r : rows)
      if (r.eps == eps) out.push_back(&r);
    return out;
  }

  const ConvergenceRow *find(double eps, std::size_t N) const {
    for (const auto &r : rows)
      if (r.eps == eps && r.N == N) return &r;
    return nullptr;
  }

  bool has_failures() const {
    return std::any_of(rows.begin(), rows.end(), [](const auto &r) { return r.failure.has_value(); });
  }
};

namespace detail {

inline double measure(const ExperimentConfig &cfg, const AnyProblem &problem, const AnySolution &sol) {
  if (const auto *s1 = std::get_if<DiscreteSolution1D>(&sol)) {
    const auto &exact = std::get<ProblemSpec1D>(problem).exact;
    return cfg.norm == NormKind::nodal_max ? nodal_max_error(*s1, exact) : discrete_l2_error(*s1, exact);
  }
  const auto &s2 = std::get<Grid2DSolution>(sol);
  const auto &exact = std::get<ProblemSpec2D>(problem).exact;
  return cfg.norm == NormKind::nodal_max ? nodal_max_error(s2, exact, cfg.region)
                                         : discrete_l2_error(s2, exact, cfg.region);
}

inline LambdaOverride lambdas_of(const AnySolution &sol) {
  if (const auto *s1 = std::get_if<DiscreteSolution1D>(&sol)) return {s1->mesh.lambda(), 0.0};
  const auto &s2 = std::get<Grid2DSolution>(sol);
  return {s2.mesh.x_mesh.lambda(), s2.mesh.y_mesh.lambda()};
}

inline double two_mesh_difference(const ExperimentConfig &cfg, const AnySolution &coarse,
                                  const AnySolution &fine) {
  if (cfg.norm != NormKind::nodal_max)
    throw std::invalid_argument("two-mesh mode measures the nodal max norm only");
  if (const auto *c1 = std::get_if<DiscreteSolution1D>(&coarse))
    return two_mesh_error(*c1, std::get<DiscreteSolution1D>(fine));
  return two_mesh_error(std::get<Grid2DSolution>(coarse), std::get<Grid2DSolution>(fine), cfg.region);
}

inline ConvergenceRow run_row(const ExperimentConfig &cfg, double eps, std::size_t N) {
  ConvergenceRow row;
  row.eps = eps;
  row.N = N;
  try {
    ProblemParams params = cfg.run.params;
    params.eps = eps;
    const AnyProblem problem = make_named_problem(cfg.run.problem, params);
    const AnySolution sol = solve_configured(cfg.run, problem, N);
    if (cfg.error == ErrorMode::exact) {
      row.error = measure(cfg, problem, sol);
    } else {
      // Shishkin refinements keep the coarse transition point so node sets nest.
      std::optional<LambdaOverride> lam;
      if (cfg.run.mesh == MeshKind::shishkin) lam = lambdas_of(sol);
      const AnySolution fine = solve_configured(cfg.run, problem, 2 * N, lam);
      row.error = two_mesh_difference(cfg, sol, fine);
    }
  } catch (const std::exception &e) {
    row.failure = e.what();
  }
  return row;
}

} // namespace detail

/// Runs every (eps, N) pair of the config. Failures are recorded in their row.
inline ConvergenceTable run_convergence(const ExperimentConfig &cfg) {
  cfg.validate();
  ConvergenceTable table;
  table.problem = cfg.run.problem;
  table.scheme = to_string(cfg.run.scheme);
  table.mesh = to_string(cfg.run.mesh);
  table.norm = cfg.norm == NormKind::nodal_max ? "nodal_max" : "discrete_l2";
  table.error_mode = cfg.error == ErrorMode::exact ? "exact" : "two_mesh";

  std::vector<std::pair<double, std::size_t>> jobs;
  for (double e : cfg.eps)
    for (std::size_t n : cfg.N) jobs.emplace_back(e, n);
  table.rows.resize(jobs.size());

  const unsigned threads = std::max(1u, cfg.threads);
  if (threads == 1) {
    for (std::size_t k = 0; k < jobs.size(); ++k)
      table.rows[k] = detail::run_row(cfg, jobs[k].first, jobs[k].second);
  } else {
    // Rows are independent; each worker writes only its own slots.
    std::vector<std::future<void>> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.push_back(std::async(std::launch::async, [&, t] {
        for (std::size_t k = t; k < jobs.size(); k += threads)
          table.rows[k] = detail::run_row(cfg, jobs[k].first, jobs[k].second);
      }));
    }
    for (auto &w : workers) w.get();
  }

  for (std::size_t k = 0; k + 1 < table.rows.size(); ++k) {
    ConvergenceRow &a = table.rows[k];
    const ConvergenceRow &b = table.rows[k + 1];
    if (a.eps != b.eps || !a.error || !b.error) continue;
    a.rate_plain = rate_between(*a.error, *b.error, a.N, b.N, RateModel::plain);
    a.rate_log_adjusted = rate_between(*a.error, *b.error, a.N, b.N, RateModel::log_adjusted);
  }
  return table;
}

namespace detail {

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

inline std::string format_optional(const std::optional<double> &v) {
  return v ? format_number(*v) : std::string();
}

inline void write_row(std::ostream &os, const ConvergenceRow &r) {
  os << format_number(r.eps) << ',' << r.N << ',' << format_optional(r.error) << ','
     << format_optional(r.rate_plain) << ',' << format_optional(r.rate_log_adjusted) << '\n';
}

} // namespace detail

inline constexpr const char *csv_header = "eps,N,error,rate_plain,rate_log_adjusted";

/// Fixed-schema CSV; absent cells are empty.
inline void write_csv(std::ostream &os, const ConvergenceTable &table) {
  os << csv_header << '\n';
  for (const auto &r : table.rows) detail::write_row(os, r);
}

// ---------------------------------------------------------------------------
// Side-by-side comparison

struct CompareConfig {
  ExperimentConfig base;
  std::vector<std::pair<std::string, RunSpec>> variants;
};

/// Top-level fields give the shared experiment; "runs" lists per-variant overrides, each with an
/// optional "label".
inline CompareConfig parse_compare_config(const nlohmann::json &j) {
  CompareConfig cfg;
  if (!j.contains("runs") || !j.at("runs").is_array() || j.at("runs").size() < 2)
    throw std::invalid_argument("compare config needs a \"runs\" array with at least two entries");
  nlohmann::json base = j;
  base.erase("runs");
  const auto &first = j.at("runs").front();
  for (const char *key : {"scheme", "mesh", "problem"})
    if (!base.contains(key) && first.contains(key)) base[key] = first.at(key);
  cfg.base = parse_experiment_config(base);
  for (const auto &r : j.at("runs")) {
    RunSpec spec = cfg.base.run;
    detail::apply_run_fields(r, spec);
    std::string label = detail::json_or<std::string>(r, "label", "");
    if (label.empty()) label = std::string(to_string(spec.scheme)) + "/" + to_string(spec.mesh);
    cfg.variants.emplace_back(std::move(label), std::move(spec));
  }
  return cfg;
}

inline std::vector<std::pair<std::string, ConvergenceTable>> run_compare(const CompareConfig &cfg) {
  std::vector<std::pair<std::string, ConvergenceTable>> out;
  for (const auto &[label, spec] : cfg.variants) {
    ExperimentConfig c = cfg.base;
    c.run = spec;
    out.emplace_back(label, run_convergence(c));
  }
  return out;
}

inline void write_compare_csv(std::ostream &os,
                              const std::vector<std::pair<std::string, ConvergenceTable>> &tables) {
  os << "label," << csv_header << '\n';
  for (const auto &[label, table] : tables) {
    for (const auto &r : table.rows) {
      os << label << ',';
      detail::write_row(os, r);
    }
  }
}

} // namespace convdiff

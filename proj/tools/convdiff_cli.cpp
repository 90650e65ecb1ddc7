// Command-line front end: single solves, convergence sweeps and side-by-side comparisons.
// Exit codes: 0 success, 1 usage error, 2 numerical failure.

#include "convdiff/convdiff.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace convdiff;

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_numerical = 2;

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveArgs {
  std::string problem;
  std::string scheme;
  std::string mesh = "uniform";
  std::size_t N = 0;
  double eps = 0.0;
  std::string delta = "coarse_half_h";
  double delta_constant = 0.0;
  double b1 = 1.0;
  double b2 = 1.0;
  std::string out;
  std::string dump_system;
  std::string export_mesh;
};

class Output {
public:
  explicit Output(const std::string &path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw usage_error("cannot open '" + path + "' for writing");
  }
  std::ostream &stream() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

nlohmann::json read_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot read config '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw usage_error("malformed config '" + path + "': " + e.what());
  }
}

int run_solve(const SolveArgs &a) {
  RunSpec spec;
  spec.problem = a.problem;
  spec.params = {a.eps, a.b1, a.b2};
  spec.scheme = parse_scheme(a.scheme);
  spec.mesh = parse_mesh_kind(a.mesh);
  spec.delta = parse_delta_strategy(a.delta, a.delta_constant);

  ExperimentConfig check;
  check.run = spec;
  check.N = {a.N};
  check.eps = {a.eps};
  check.validate();

  const AnyProblem problem = make_named_problem(spec.problem, spec.params);

  if (!a.dump_system.empty() || !a.export_mesh.empty()) {
    Output dump(a.dump_system);
    Output mesh_out(a.export_mesh);
    if (const auto *p1 = std::get_if<ProblemSpec1D>(&problem)) {
      const Mesh1D m = build_mesh(spec, *p1, a.N);
      if (!a.dump_system.empty()) io::write_system(dump.stream(), assemble_1d(*p1, m, detail::scheme_1d(spec.scheme)));
      if (!a.export_mesh.empty()) io::write_mesh_nodes(mesh_out.stream(), m);
    } else {
      const auto &p2 = std::get<ProblemSpec2D>(problem);
      const TensorMesh2D m = build_tensor_mesh(spec, p2, a.N);
      const Triangulation t = triangulate(m);
      if (!a.dump_system.empty()) {
        if (spec.scheme == Scheme::fd2d_upwind) {
          io::write_system(dump.stream(), assemble_upwind_2d(p2, m));
        } else {
          const DeltaStrategy d = spec.scheme == Scheme::fem_galerkin ? DeltaStrategy::galerkin() : spec.delta;
          io::write_system(dump.stream(), assemble_fem(p2, FemSpace(t), d));
        }
      }
      if (!a.export_mesh.empty()) io::write_triangulation(mesh_out.stream(), t);
    }
  }

  const AnySolution sol = solve_configured(spec, problem, a.N);
  Output out(a.out);
  std::visit([&](const auto &s) { io::write_solution(out.stream(), s); }, sol);
  return exit_ok;
}

int run_convergence_cmd(const std::string &path) {
  const ExperimentConfig cfg = parse_experiment_config(read_config(path));
  const ConvergenceTable table = run_convergence(cfg);
  Output out(cfg.output);
  write_csv(out.stream(), table);
  for (const auto &r : table.rows)
    if (r.failure) std::cerr << "eps=" << r.eps << " N=" << r.N << ": " << *r.failure << '\n';
  return table.has_failures() ? exit_numerical : exit_ok;
}

int run_compare_cmd(const std::string &path) {
  const CompareConfig cfg = parse_compare_config(read_config(path));
  const auto tables = run_compare(cfg);
  Output out(cfg.base.output);
  write_compare_csv(out.stream(), tables);
  bool failed = false;
  for (const auto &[label, table] : tables) {
    for (const auto &r : table.rows) {
      if (!r.failure) continue;
      failed = true;
      std::cerr << label << " eps=" << r.eps << " N=" << r.N << ": " << *r.failure << '\n';
    }
  }
  return failed ? exit_numerical : exit_ok;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Solvers for singularly perturbed convection-diffusion problems"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto *solve = app.add_subcommand("solve", "Solve one problem and print the nodal solution");
  solve->add_option("--problem", sa.problem, "p1 or mms2d")->required();
  solve->add_option("--scheme", sa.scheme, "central|upwind|ilin|fd2d-upwind|fem-galerkin|fem-sdfem")->required();
  solve->add_option("--mesh", sa.mesh, "uniform|shishkin|bakhvalov")->capture_default_str();
  solve->add_option("--N", sa.N, "number of mesh intervals per axis")->required();
  solve->add_option("--eps", sa.eps, "diffusion coefficient")->required();
  solve->add_option("--delta", sa.delta, "galerkin_zero|coarse_half_h|user_constant")->capture_default_str();
  solve->add_option("--delta-constant", sa.delta_constant, "value for user_constant");
  solve->add_option("--b1", sa.b1, "x convection component (mms2d)")->capture_default_str();
  solve->add_option("--b2", sa.b2, "y convection component (mms2d)")->capture_default_str();
  solve->add_option("--out", sa.out, "solution file (default stdout)");
  solve->add_option("--dump-system", sa.dump_system, "write the assembled system in coordinate format");
  solve->add_option("--export-mesh", sa.export_mesh, "write mesh nodes (1D) or the triangulation (2D)");

  std::string config;
  auto *conv = app.add_subcommand("convergence", "Run a convergence sweep from a JSON config");
  conv->add_option("--config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  auto *cmp = app.add_subcommand("compare", "Run several discretizations of one sweep side by side");
  cmp->add_option("--config", config, "JSON compare config")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*solve) return run_solve(sa);
    if (*conv) return run_convergence_cmd(config);
    return run_compare_cmd(config);
  } catch (const numerical_error &e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const usage_error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const nlohmann::json::exception &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_usage;
  }
}

// Command-line front end: tables, solve, stability, converge, problems.
// Data goes to --out (or stdout); summary counters go to stderr.
// Exit codes: 0 ok, 2 config error, 3 solver divergence, 4 I/O failure.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "aderdg/aderdg.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw ConfigError("trailing characters in " + what + ": " + text);
    return v;
  } catch (const std::invalid_argument&) {
    throw ConfigError("cannot parse " + what + ": " + text);
  } catch (const std::out_of_range&) {
    throw ConfigError("out of range " + what + ": " + text);
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// "uniform:L:a:b" or "graded:L1:a:b,L2:b:c,..."; counts are cells per segment
template <class S>
aderdg::TimeMesh<S> parse_mesh_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("mesh spec needs a kind prefix: " + spec);
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  try {
    if (kind == "uniform") {
      const auto parts = split(rest, ':');
      if (parts.size() != 3) throw ConfigError("uniform mesh spec is uniform:L:a:b");
      const int cells = static_cast<int>(parse_number(parts[0], "cell count"));
      return aderdg::uniform_mesh<S>(S(parse_number(parts[1], "mesh start")),
                                     S(parse_number(parts[2], "mesh end")), cells);
    }
    if (kind == "graded") {
      std::vector<aderdg::MeshSegment<S>> segments;
      for (const auto& seg : split(rest, ',')) {
        const auto parts = split(seg, ':');
        if (parts.size() != 3) throw ConfigError("graded mesh segment is L:a:b");
        segments.push_back({static_cast<int>(parse_number(parts[0], "cell count")),
                            S(parse_number(parts[1], "segment start")),
                            S(parse_number(parts[2], "segment end"))});
      }
      return aderdg::graded_mesh(segments);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid mesh spec: ") + e.what());
  }
  throw ConfigError("unknown mesh kind '" + kind + "' (use uniform or graded)");
}

// "log:min:max:count"
std::vector<double> parse_radii_spec(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 4 || parts[0] != "log")
    throw ConfigError("radii spec is log:min:max:count: " + spec);
  const double lo = parse_number(parts[1], "radius min");
  const double hi = parse_number(parts[2], "radius max");
  const int count = static_cast<int>(parse_number(parts[3], "radius count"));
  if (!(lo > 0) || !(hi > lo) || count < 2)
    throw ConfigError("radii must satisfy 0 < min < max, count >= 2");
  std::vector<double> radii(count);
  for (int i = 0; i < count; ++i) radii[i] = lo * std::pow(hi / lo, double(i) / (count - 1));
  return radii;
}

aderdg::ProblemParams parse_params(const std::vector<std::string>& kvs) {
  aderdg::ProblemParams params;
  for (const auto& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("parameter must be key=value: " + kv);
    params[kv.substr(0, eq)] = parse_number(kv.substr(eq + 1), "parameter " + kv.substr(0, eq));
  }
  return params;
}

aderdg::SolverKind parse_solver(const std::string& name) {
  if (name == "picard") return aderdg::SolverKind::picard;
  if (name == "newton") return aderdg::SolverKind::newton;
  if (name == "auto") return aderdg::SolverKind::automatic;
  throw ConfigError("unknown solver '" + name + "' (use picard, newton or auto)");
}

// Writes through an owned file stream, or stdout when no path is given.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw IoError("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    stream().flush();
    if (file_.is_open() && !file_) throw IoError("write failure on output file");
    if (!file_.is_open() && !std::cout) throw IoError("write failure on standard output");
  }

 private:
  std::ofstream file_;
};

template <class S>
aderdg::IntegratorOptions<S> make_options(int degree, const std::string& solver, double tol,
                                          int max_iter) {
  aderdg::IntegratorOptions<S> opts;
  opts.degree = degree;
  opts.solver = parse_solver(solver);
  opts.tol = S(tol);
  if (max_iter > 0) {
    opts.picard_max_iter = max_iter;
    opts.newton_max_iter = max_iter;
  }
  return opts;
}

template <class S>
int run_tables(int degree, const std::string& format, const std::string& out) {
  if (degree < 0) throw ConfigError("degree must be nonnegative");
  const auto tables = aderdg::build_tables<S>(degree);
  OutputTarget target(out);
  if (format == "csv") {
    aderdg::write_tables_csv(target.stream(), tables);
  } else if (format == "json") {
    auto& os = target.stream();
    auto vec = [&os](const char* name, const std::vector<S>& v) {
      os << "\"" << name << "\":[";
      for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? "," : "") << aderdg::format_scalar(v[i]);
      os << "]";
    };
    auto mat = [&os](const char* name, const aderdg::DenseMatrix<S>& m) {
      os << "\"" << name << "\":[";
      for (int i = 0; i < m.rows(); ++i) {
        os << (i ? ",[" : "[");
        for (int j = 0; j < m.cols(); ++j) os << (j ? "," : "") << aderdg::format_scalar(m(i, j));
        os << "]";
      }
      os << "]";
    };
    os << "{\"degree\":" << degree << ",";
    vec("nodes", tables.nodes);
    os << ",";
    vec("weights", tables.weights);
    os << ",";
    mat("K", tables.K);
    os << ",";
    vec("M", tables.M);
    os << ",";
    mat("B", tables.B);
    os << ",";
    vec("phi_at_0", tables.phi_at_0);
    os << ",";
    vec("phi_at_1", tables.phi_at_1);
    os << "}\n";
  } else {
    throw ConfigError("unknown format '" + format + "' (use csv or json)");
  }
  target.finish();
  return kExitOk;
}

struct SolveArgs {
  std::string problem;
  std::vector<std::string> params;
  int degree = 3;
  std::string mesh_spec;
  std::string solver = "auto";
  int subnodes = 0;
  bool endpoints = false;
  double tol = 1e-13;
  int max_iter = 0;  // 0 keeps the per-solver defaults
  std::string out;
};

template <class S>
int run_solve(const SolveArgs& args) {
  const auto spec = aderdg::get_problem<S>(args.problem, parse_params(args.params));
  const auto mesh =
      args.mesh_spec.empty() ? spec.default_meshes.front() : parse_mesh_spec<S>(args.mesh_spec);
  const auto opts = make_options<S>(args.degree, args.solver, args.tol, args.max_iter);

  const auto start = std::chrono::steady_clock::now();
  const auto traj = aderdg::solve_ivp(spec.problem, mesh, opts);
  const auto wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);

  OutputTarget target(args.out);
  aderdg::write_solution_csv(target.stream(), traj, args.subnodes, args.endpoints);
  target.finish();
  std::cerr << "solve: elements=" << traj.num_elements() << " degree=" << args.degree
            << " rhs_evals=" << traj.stats.rhs_evals << " jac_evals=" << traj.stats.jac_evals
            << " wall_ms=" << wall.count() << "\n";
  return kExitOk;
}

template <class S>
int run_stability(int degree, const std::string& window, const std::string& res, bool have_ray,
                  double ray_arg_pi, const std::string& radii_spec, const std::string& out) {
  if (degree < 0) throw ConfigError("degree must be nonnegative");
  const auto tables = aderdg::build_tables<S>(degree);
  if (have_ray == !window.empty())
    throw ConfigError("pass exactly one of --window or --ray");
  OutputTarget target(out);
  if (!window.empty()) {
    const auto w = split(window, ':');
    const auto r = split(res, ':');
    if (w.size() != 4) throw ConfigError("window is reMin:reMax:imMin:imMax");
    if (r.size() != 2) throw ConfigError("res is W:H");
    const auto raster = aderdg::raster_region<S>(
        tables, S(parse_number(w[0], "reMin")), S(parse_number(w[1], "reMax")),
        S(parse_number(w[2], "imMin")), S(parse_number(w[3], "imMax")),
        static_cast<int>(parse_number(r[0], "raster width")),
        static_cast<int>(parse_number(r[1], "raster height")));
    aderdg::write_raster_csv(target.stream(), raster);
  } else {
    const auto radii_d =
        parse_radii_spec(radii_spec.empty() ? std::string("log:1e-2:1e8:100") : radii_spec);
    const std::vector<S> radii(radii_d.begin(), radii_d.end());
    const auto profile =
        aderdg::ray_profile<S>(tables, S(ray_arg_pi) * std::numbers::pi_v<S>, radii);
    aderdg::write_ray_csv(target.stream(), radii, profile);
  }
  target.finish();
  return kExitOk;
}

template <class S>
int run_converge(const std::string& problem, const std::vector<std::string>& params, int degree,
                 const std::string& meshes_csv, int subnodes, double noise_floor,
                 const std::string& solver, int jobs, const std::string& out) {
  const auto spec = aderdg::get_problem<S>(problem, parse_params(params));
  std::vector<aderdg::TimeMesh<S>> meshes;
  if (meshes_csv.empty()) {
    meshes = spec.default_meshes;
  } else {
    for (const auto& item : split(meshes_csv, ',')) {
      const int nodes = static_cast<int>(parse_number(item, "mesh node count"));
      if (nodes < 2) throw ConfigError("mesh node counts must be at least 2");
      meshes.push_back(aderdg::uniform_mesh<S>(spec.problem.t0, spec.problem.t_end, nodes - 1));
    }
  }
  const auto opts = make_options<S>(degree, solver, 1e-13, 0);
  const auto start = std::chrono::steady_clock::now();
  const auto report =
      aderdg::convergence_study(spec.problem, degree, meshes, subnodes, S(noise_floor), opts, jobs);
  const auto wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
  OutputTarget target(out);
  target.stream() << aderdg::report_to_json(report) << "\n";
  target.finish();
  std::cerr << "converge: meshes=" << meshes.size() << " degree=" << degree
            << " rhs_evals=" << report.total_stats.rhs_evals
            << " jac_evals=" << report.total_stats.jac_evals << " wall_ms=" << wall.count()
            << "\n";
  return kExitOk;
}

int run_problems_list(const std::string& out) {
  OutputTarget target(out);
  auto& os = target.stream();
  os << "name,dim,t0,t_end,params\n";
  for (const auto& info : aderdg::list_problems()) {
    os << info.name << "," << info.dim << "," << aderdg::format_scalar(info.t0) << ","
       << aderdg::format_scalar(info.t_end) << "," << info.params << "\n";
  }
  target.finish();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arbitrary-high-order one-step ODE solver with local DG predictor"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI file (sections per subcommand)");

  std::string scalar = "double";
  app.add_option("--scalar", scalar, "working precision: double or longdouble")
      ->capture_default_str();

  auto* tables_cmd = app.add_subcommand("tables", "dump scheme tables for one degree");
  int tables_degree = 3;
  std::string tables_format = "csv", tables_out;
  tables_cmd->add_option("--degree", tables_degree, "basis polynomial degree")->required();
  tables_cmd->add_option("--format", tables_format, "csv or json");
  tables_cmd->add_option("--out", tables_out, "output path (default stdout)");

  auto* solve_cmd = app.add_subcommand("solve", "integrate a registered problem");
  SolveArgs solve_args;
  solve_cmd->add_option("--problem", solve_args.problem, "problem name")->required();
  solve_cmd->add_option("--param", solve_args.params, "problem parameter key=value");
  solve_cmd->add_option("--degree", solve_args.degree, "basis polynomial degree")->required();
  solve_cmd->add_option("--mesh", solve_args.mesh_spec,
                        "uniform:L:a:b or graded:L1:a:b,L2:b:c,... (default: registry mesh)");
  solve_cmd->add_option("--solver", solve_args.solver, "picard, newton or auto");
  solve_cmd->add_option("--subnodes", solve_args.subnodes, "sub-nodes per element in the output");
  solve_cmd->add_flag("--endpoints", solve_args.endpoints,
                      "include element endpoints in the subgrid");
  solve_cmd->add_option("--tol", solve_args.tol, "predictor tolerance");
  solve_cmd->add_option("--max-iter", solve_args.max_iter, "iteration cap for both solvers");
  solve_cmd->add_option("--out", solve_args.out, "output path (default stdout)");

  auto* stab_cmd = app.add_subcommand("stability", "stability-function data");
  int stab_degree = 3;
  std::string stab_window, stab_res = "200:200", stab_radii, stab_out;
  double stab_ray = 1.0;
  stab_cmd->add_option("--degree", stab_degree, "basis polynomial degree")->required();
  stab_cmd->add_option("--window", stab_window, "raster window reMin:reMax:imMin:imMax");
  stab_cmd->add_option("--res", stab_res, "raster resolution W:H");
  auto* ray_opt = stab_cmd->add_option("--ray", stab_ray, "ray angle as a multiple of pi");
  stab_cmd->add_option("--radii", stab_radii, "ray radii log:min:max:count");
  stab_cmd->add_option("--out", stab_out, "output path (default stdout)");

  auto* conv_cmd = app.add_subcommand("converge", "convergence-order study");
  std::string conv_problem, conv_meshes, conv_solver = "auto", conv_out;
  std::vector<std::string> conv_params;
  int conv_degree = 1, conv_subnodes = 1000, conv_jobs = 0;
  double conv_floor = 1e-12;
  conv_cmd->add_option("--problem", conv_problem, "problem name")->required();
  conv_cmd->add_option("--param", conv_params, "problem parameter key=value");
  conv_cmd->add_option("--degree", conv_degree, "basis polynomial degree")->required();
  conv_cmd->add_option("--meshes", conv_meshes,
                       "comma list of node counts (default: registry ladder)");
  conv_cmd->add_option("--subnodes", conv_subnodes, "sub-nodes per element for local errors");
  conv_cmd->add_option("--noise-floor", conv_floor, "exclude error rows below this value");
  conv_cmd->add_option("--solver", conv_solver, "picard, newton or auto");
  conv_cmd->add_option("--jobs", conv_jobs, "parallel mesh solves (0 = hardware)");
  conv_cmd->add_option("--out", conv_out, "output path (default stdout)");

  auto* problems_cmd = app.add_subcommand("problems", "problem registry");
  auto* list_cmd = problems_cmd->add_subcommand("list", "list registered problems");
  std::string problems_out;
  list_cmd->add_option("--out", problems_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  auto dispatch = [&](auto tag) -> int {
    using S = typename decltype(tag)::type;
    if (tables_cmd->parsed()) return run_tables<S>(tables_degree, tables_format, tables_out);
    if (solve_cmd->parsed()) return run_solve<S>(solve_args);
    if (stab_cmd->parsed())
      return run_stability<S>(stab_degree, stab_window, stab_res, ray_opt->count() > 0, stab_ray,
                              stab_radii, stab_out);
    if (conv_cmd->parsed())
      return run_converge<S>(conv_problem, conv_params, conv_degree, conv_meshes, conv_subnodes,
                             conv_floor, conv_solver, conv_jobs, conv_out);
    if (problems_cmd->parsed()) {
      if (list_cmd->parsed()) return run_problems_list(problems_out);
      throw ConfigError("problems requires the list subcommand");
    }
    throw ConfigError("no subcommand given");
  };
  try {
    if (scalar == "double") return dispatch(std::type_identity<double>{});
    if (scalar == "longdouble") return dispatch(std::type_identity<long double>{});
    throw ConfigError("unknown scalar '" + scalar + "' (use double or longdouble)");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const aderdg::RegistryError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const aderdg::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const aderdg::EvaluationError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

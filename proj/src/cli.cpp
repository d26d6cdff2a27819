#include "fvk/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "fvk/airy.hpp"
#include "fvk/config.hpp"
#include "fvk/solver.hpp"

namespace fvk {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerics = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "problem configuration file")->required();
  sub->add_option("--out", args.out_dir, "output directory")->required();
  sub->add_option("--seed", args.seed, "override the solver seed");
  sub->add_option("--threads", args.threads, "worker threads for the volume quadrature")
      ->check(CLI::PositiveNumber);
}

ProblemConfig load_config(const CommonArgs& args) {
  ProblemConfig cfg = parse_config_file(args.config_path);
  if (args.seed) cfg.solver.seed = *args.seed;
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string());
  os << text;
  if (!os) throw IoError("write failed for " + path.string());
}

void prepare_out(const CommonArgs& args, const ProblemConfig& cfg) {
  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + args.out_dir);
  write_text(fs::path(args.out_dir) / "resolved_config.ini", echo_config(cfg));
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

json residual_block(const SolveReport& rep) {
  return json{{"el_r1_l2", rep.el_r1_l2},
              {"el_r2_l2", rep.el_r2_l2},
              {"bdry_b1", rep.bdry_b1},
              {"bdry_b2", rep.bdry_b2},
              {"bdry_b3", rep.bdry_b3},
              {"airy_ls_residual", rep.airy_ls_residual},
              {"stationarity_max", rep.stationarity.max_normalized_residual},
              {"stationarity_n_tests", rep.stationarity.n_tests}};
}

int cmd_solve(const CommonArgs& args) {
  const ProblemConfig cfg = load_config(args);
  prepare_out(args, cfg);
  const PlateProblem problem = make_problem(cfg);
  const SolveReport rep = minimize(problem, cfg.solver);

  const fs::path out(args.out_dir);
  json doc = residual_block(rep);
  doc["final_energy"] = rep.final_energy;
  doc["final_grad_norm"] = rep.final_grad_norm;
  doc["iterations"] = rep.iterations;
  doc["converged"] = rep.converged;
  doc["stop_reason"] = rep.stop_reason;
  doc["seed"] = cfg.solver.seed;
  doc["grid"] = json{{"nx", cfg.nx}, {"ny", cfg.ny}};
  write_json(out / "report.json", doc);

  std::ostringstream trace;
  trace << "iter,energy\n";
  for (std::size_t k = 0; k < rep.energy_trace.size(); ++k)
    trace << k << "," << format_double(rep.energy_trace[k]) << "\n";
  write_text(out / "energy_trace.csv", trace.str());

  write_csv((out / "w.csv").string(), rep.displacement.w, "w");
  write_csv((out / "v.csv").string(), rep.displacement.v, "v");
  return kExitOk;
}

int cmd_gamma(const CommonArgs& args) {
  const ProblemConfig cfg = load_config(args);
  if (!cfg.has_displacement)
    throw ConfigError({"gamma requires the [displacement] block (w1, w2, v expressions)"});
  prepare_out(args, cfg);
  const PlateProblem problem = make_problem(cfg);

  GammaOptions opts;
  opts.n_inplane = cfg.n_inplane;
  opts.n_thickness = cfg.n_thickness;
  opts.n_reference = cfg.n_reference;
  opts.threads = args.threads;
  const GammaStudy study = gamma_study(problem, make_displacement(cfg), cfg.h_list, opts);
  write_gamma_csv((fs::path(args.out_dir) / "gamma.csv").string(), study);
  return kExitOk;
}

int cmd_residual(const CommonArgs& args, const std::string& w_csv, const std::string& v_csv) {
  const ProblemConfig cfg = load_config(args);
  const bool from_files = !w_csv.empty() || !v_csv.empty();
  if (from_files && (w_csv.empty() || v_csv.empty()))
    throw ConfigError({"residual needs both --w and --v when loading fields from files"});
  if (!from_files && !cfg.has_displacement)
    throw ConfigError({"residual requires the [displacement] block or --w/--v field files"});
  prepare_out(args, cfg);
  const PlateProblem problem = make_problem(cfg);

  Displacement d(problem.grid());
  if (from_files) {
    d.w = read_vector2_csv(w_csv, problem.grid());
    d.v = read_scalar_csv(v_csv, problem.grid());
  } else {
    d.w = sample(cfg.w_expr, problem.grid());
    d.v = sample(cfg.v_expr, problem.grid());
  }

  const AiryField airy = airy_from_displacement(problem, d);
  const ElResiduals el = el_residuals(problem, d, airy);
  const BoundaryResiduals bd = boundary_residuals(problem, d, airy);
  const StationarityReport st =
      stationarity_report(problem, d, cfg.solver.n_stationarity_tests, cfg.solver.seed + 1);

  const fs::path out(args.out_dir);
  const json doc{{"el_r1_l2", interior_l2_norm(el.r1, el.margin)},
                 {"el_r2_l2", interior_l2_norm(el.r2, el.margin)},
                 {"bdry_b1", bd.b1},
                 {"bdry_b2", bd.b2},
                 {"bdry_b3", bd.b3},
                 {"airy_ls_residual", airy.ls_residual},
                 {"stationarity_max", st.max_normalized_residual},
                 {"stationarity_n_tests", st.n_tests}};
  write_json(out / "residual_report.json", doc);
  write_csv((out / "el_r1.csv").string(), el.r1, "r1");
  write_csv((out / "el_r2.csv").string(), el.r2, "r2");
  write_csv((out / "airy_phi.csv").string(), airy.phi, "phi");
  return kExitOk;
}

int cmd_material_table(const CommonArgs& args) {
  const ProblemConfig cfg = load_config(args);
  prepare_out(args, cfg);
  const LameMaterial mat(cfg.mu, cfg.lambda);

  struct Row {
    const char* name;
    Eigen::Matrix2d f;
  };
  std::vector<Row> rows;
  rows.push_back({"identity", Eigen::Matrix2d::Identity()});
  rows.push_back({"e11", (Eigen::Matrix2d() << 1, 0, 0, 0).finished()});
  rows.push_back({"e22", (Eigen::Matrix2d() << 0, 0, 0, 1).finished()});
  rows.push_back({"shear_sym", (Eigen::Matrix2d() << 0, 0.5, 0.5, 0).finished()});
  rows.push_back({"half_e11", (Eigen::Matrix2d() << 0.5, 0, 0, 0).finished()});
  rows.push_back({"traceless", (Eigen::Matrix2d() << 1, 0, 0, -1).finished()});

  std::ostringstream os;
  os << "# mu=" << format_double(mat.mu) << ",lambda=" << format_double(mat.lambda)
     << ",S=" << format_double(mat.young_modulus()) << ",nu=" << format_double(mat.poisson_ratio())
     << ",B=" << format_double(mat.bending_stiffness()) << "\n";
  os << "name,f11,f12,f21,f22,q3_lift,q2_closed,q2_minimized,c1,c2,c3,l1,l2,l3\n";
  for (const Row& row : rows) {
    const auto min = q2_minimized(row.f, mat);
    const Eigen::Vector3d c = c_map(row.f, mat);
    // l of the c-completed lift recovers c; emitted as a cross-check.
    Eigen::Matrix3d lifted = lift_2x2(row.f);
    lifted(0, 2) = lifted(2, 0) = 0.5 * c(0);
    lifted(1, 2) = lifted(2, 1) = 0.5 * c(1);
    lifted(2, 2) = c(2);
    const Eigen::Vector3d l = l_map(lifted);
    os << row.name;
    for (int r = 0; r < 2; ++r)
      for (int cix = 0; cix < 2; ++cix) os << "," << format_double(row.f(r, cix));
    os << "," << format_double(q3(lift_2x2(row.f), mat));
    os << "," << format_double(q2_closed(row.f, mat));
    os << "," << format_double(min.value);
    for (int k = 0; k < 3; ++k) os << "," << format_double(c(k));
    for (int k = 0; k < 3; ++k) os << "," << format_double(l(k));
    os << "\n";
  }
  write_text(fs::path(args.out_dir) / "material_table.csv", os.str());
  return kExitOk;
}

int cmd_export(const CommonArgs& args) {
  const ProblemConfig cfg = load_config(args);
  prepare_out(args, cfg);
  const Grid2D grid = make_grid(cfg);
  const fs::path out(args.out_dir);

  write_csv((out / "g1.csv").string(), sample(cfg.g1, grid), "g1");
  write_csv((out / "g2.csv").string(), sample(cfg.g2, grid), "g2");
  write_csv((out / "eps.csv").string(), sample(cfg.eps, grid), "eps");
  write_csv((out / "kappa.csv").string(), sample(cfg.kappa, grid), "kappa");
  if (cfg.has_displacement) {
    write_csv((out / "w.csv").string(), sample(cfg.w_expr, grid), "w");
    write_csv((out / "v.csv").string(), sample(cfg.v_expr, grid), "v");
  }
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"variable-thickness prestrained plate toolkit"};
  app.require_subcommand(1);

  CommonArgs solve_args, gamma_args, residual_args, table_args, export_args;
  std::string w_csv, v_csv;

  CLI::App* solve = app.add_subcommand("solve", "minimize the plate energy");
  add_common(solve, solve_args);
  CLI::App* gamma = app.add_subcommand("gamma", "h-refinement study of the scaled 3d energy");
  add_common(gamma, gamma_args);
  CLI::App* residual = app.add_subcommand("residual", "Euler-Lagrange residual report");
  add_common(residual, residual_args);
  residual->add_option("--w", w_csv, "in-plane displacement CSV (overrides [displacement])");
  residual->add_option("--v", v_csv, "deflection CSV (overrides [displacement])");
  CLI::App* table = app.add_subcommand("material-table", "quadratic form sample table");
  add_common(table, table_args);
  CLI::App* exp = app.add_subcommand("export", "sample and export the configured input fields");
  add_common(exp, export_args);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (gamma->parsed()) return cmd_gamma(gamma_args);
    if (residual->parsed()) return cmd_residual(residual_args, w_csv, v_csv);
    if (table->parsed()) return cmd_material_table(table_args);
    if (exp->parsed()) return cmd_export(export_args);
    std::cerr << "fvk: no subcommand selected\n";
    return kExitConfig;
  } catch (const ConfigError& err) {
    std::cerr << "fvk: " << err.what() << "\n";
    return kExitConfig;
  } catch (const ExprParseError& err) {
    std::cerr << "fvk: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& err) {
    std::cerr << "fvk: " << err.what() << "\n";
    return kExitConfig;
  } catch (const IoError& err) {
    std::cerr << "fvk: " << err.what() << "\n";
    return kExitIo;
  } catch (const SolverError& err) {
    std::cerr << "fvk: " << err.what() << "\n";
    return kExitNumerics;
  } catch (const std::exception& err) {
    std::cerr << "fvk: " << err.what() << "\n";
    return kExitNumerics;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) { return dispatch(args); }

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run_cli(args);
}

}  // namespace fvk

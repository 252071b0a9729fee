// Command-line front end: compute, certify and compare locally optimal
// designs for inverse quadratic regression models.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "iqdesign/chebyshev.hpp"
#include "iqdesign/closed_form.hpp"
#include "iqdesign/errors.hpp"
#include "iqdesign/optimize.hpp"
#include "iqdesign/presets.hpp"
#include "iqdesign/simulate.hpp"
#include "iqdesign/verify.hpp"

using namespace iqdesign;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct ProblemArgs {
  std::string preset_name;
  std::string model_kind;
  std::string theta_csv;
  std::string space_arg;
  std::string criterion_name;
  double xe = -1.0;
  std::string cvec_csv;
};

std::vector<double> parse_csv_doubles(const std::string& text, std::size_t expect) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
  if (values.size() != expect)
    throw ValidationError("expected " + std::to_string(expect) +
                          " comma-separated values in '" + text + "'");
  return values;
}

DesignSpace parse_space(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ValidationError("expected --space lo:hi (hi may be 'inf')");
  DesignSpace space;
  space.s = std::stod(text.substr(0, colon));
  const std::string hi = text.substr(colon + 1);
  space.t = (hi == "inf") ? std::numeric_limits<double>::infinity() : std::stod(hi);
  validate(space);
  return space;
}

struct Problem {
  ModelSpec model;
  DesignSpace space;
  std::optional<double> preset_xe;
};

Problem resolve_problem(const ProblemArgs& args) {
  Problem problem;
  if (!args.preset_name.empty()) {
    const Preset& p = preset(args.preset_name);
    problem.model = p.model;
    problem.space = p.space;
    problem.preset_xe = p.extrapolation_point;
    return problem;
  }
  if (args.model_kind.empty() || args.theta_csv.empty() || args.space_arg.empty())
    throw ValidationError(
        "either --preset or all of --model/--theta/--space are required");
  problem.model.kind = model_kind_from_string(args.model_kind);
  const auto theta = parse_csv_doubles(args.theta_csv, 3);
  std::copy(theta.begin(), theta.end(), problem.model.theta.begin());
  validate(problem.model);
  problem.space = parse_space(args.space_arg);
  return problem;
}

Criterion resolve_criterion(const ProblemArgs& args, const Problem& problem) {
  const std::string& name = args.criterion_name;
  if (name == "D") return Criterion::d();
  if (name == "E") return Criterion::e();
  if (name == "D1") return Criterion::d1();
  if (name == "ce") {
    double xe = args.xe;
    if (xe < 0.0 && problem.preset_xe) xe = *problem.preset_xe;
    if (xe < 0.0) throw ValidationError("--criterion ce requires --xe");
    return Criterion::extrapolation(xe);
  }
  if (name == "c") {
    if (args.cvec_csv.empty()) throw ValidationError("--criterion c requires --cvec");
    const auto v = parse_csv_doubles(args.cvec_csv, 3);
    return Criterion::c_vector(Eigen::Vector3d(v[0], v[1], v[2]));
  }
  throw ValidationError("unknown criterion '" + name +
                        "' (expected D, E, D1, ce or c)");
}

DEfficiencyConvention parse_convention(const std::string& name) {
  if (name == "sqrt") return DEfficiencyConvention::SqrtDetRatio;
  if (name == "ratio") return DEfficiencyConvention::DetRatio;
  if (name == "cuberoot") return DEfficiencyConvention::CubeRootDetRatio;
  throw ValidationError("unknown D-efficiency convention '" + name + "'");
}

std::string fmt(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

void add_problem_flags(CLI::App* cmd, ProblemArgs& args, bool with_criterion) {
  cmd->add_option("--preset", args.preset_name, "named preset (landete)");
  cmd->add_option("--model", args.model_kind, "model kind: P1 or P2");
  cmd->add_option("--theta", args.theta_csv, "theta as t0,t1,t2");
  cmd->add_option("--space", args.space_arg, "design space as lo:hi (hi may be inf)");
  if (with_criterion) {
    cmd->add_option("--criterion", args.criterion_name, "D, E, D1, ce or c")
        ->required();
    cmd->add_option("--xe", args.xe, "extrapolation point for --criterion ce");
    cmd->add_option("--cvec", args.cvec_csv, "c-vector for --criterion c");
  }
}

int cmd_design(const ProblemArgs& args, const std::string& out_path,
               double tolerance) {
  const Problem problem = resolve_problem(args);
  const Criterion criterion = resolve_criterion(args, problem);
  SolverConfig config;
  config.equivalence_tolerance = tolerance;
  const SolveResult result =
      optimal_design(problem.model, criterion, problem.space, config);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  DesignFile file{problem.model, problem.space, result.design};
  save_design_file(file, out_path);

  std::cout << "criterion:  " << criterion.name() << "\n"
            << "form:       "
            << to_string(classify_interval(problem.model, criterion, problem.space))
            << "\n"
            << "points:    ";
  for (double u : result.design.points) std::cout << ' ' << fmt(u, 6);
  std::cout << "\nweights:   ";
  for (double w : result.design.weights) std::cout << ' ' << fmt(w, 6);
  std::cout << "\nvalue:      " << criterion_value(result.design, criterion, problem.model)
            << "\nviolation:  " << result.report.violation << "\n"
            << "written:    " << out_path << "\n";
  return kExitOk;
}

int cmd_check(const std::string& design_path, const ProblemArgs& args,
              double tolerance) {
  const DesignFile file = load_design_file(design_path);
  Problem problem{file.model, file.space, std::nullopt};
  if (!args.preset_name.empty())
    problem.preset_xe = preset(args.preset_name).extrapolation_point;
  const Criterion criterion = resolve_criterion(args, problem);
  const OptimalityReport report = check_optimality(
      file.design, criterion, file.model, file.space, tolerance);
  std::cout << to_json(report).dump(2) << "\n";
  return kExitOk;
}

struct CaseStudyDesigns {
  std::vector<std::string> names{"D", "E", "D1", "ce"};
  std::vector<Criterion> criteria;
  std::vector<Design> designs;
};

CaseStudyDesigns solve_case_study(const Preset& p) {
  CaseStudyDesigns cs;
  cs.criteria = {Criterion::d(), Criterion::e(), Criterion::d1(),
                 Criterion::extrapolation(p.extrapolation_point)};
  for (const Criterion& crit : cs.criteria)
    cs.designs.push_back(optimal_design(p.model, crit, p.space).design);
  return cs;
}

int cmd_table(const std::string& preset_name, const std::string& outdir,
              DEfficiencyConvention convention) {
  const Preset& p = preset(preset_name);
  const CaseStudyDesigns cs = solve_case_study(p);

  std::ostringstream t51;
  t51 << "criterion,u1,u2,u3,w1,w2,w3\n";
  for (std::size_t i = 0; i < cs.designs.size(); ++i) {
    t51 << cs.names[i];
    for (double u : cs.designs[i].points) t51 << ',' << fmt(u, 4);
    for (double w : cs.designs[i].weights) t51 << ',' << fmt(w, 4);
    t51 << '\n';
  }

  // Efficiency table in the published layout: the first row lists the
  // efficiencies of the comparison design under each criterion; the row for
  // an optimal design lists the efficiencies of the column designs under the
  // row's criterion.
  std::ostringstream t52;
  t52 << "design,D,E,D1,ce\n";
  for (const auto& [name, design] : p.comparison_designs) {
    t52 << name;
    for (std::size_t b = 0; b < 4; ++b)
      t52 << ',' << fmt(efficiency(design, cs.criteria[b], cs.designs[b], p.model,
                                   convention), 2);
    t52 << '\n';
  }
  for (std::size_t a = 0; a < 4; ++a) {
    t52 << "xi_" << cs.names[a];
    for (std::size_t b = 0; b < 4; ++b)
      t52 << ',' << fmt(efficiency(cs.designs[b], cs.criteria[a], cs.designs[a],
                                   p.model, convention), 2);
    t52 << '\n';
  }

  for (const auto& [file, text] :
       {std::pair{std::string("table51.csv"), t51.str()},
        std::pair{std::string("table52.csv"), t52.str()}}) {
    const std::string path = outdir + "/" + file;
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << text;
    std::cout << path << ":\n" << text << "\n";
  }
  return kExitOk;
}

int cmd_efficiency(const std::string& preset_name,
                   const std::vector<std::string>& design_files,
                   DEfficiencyConvention convention) {
  const Preset& p = preset(preset_name);
  const CaseStudyDesigns cs = solve_case_study(p);

  std::vector<std::pair<std::string, Design>> rows = p.comparison_designs;
  for (const auto& path : design_files)
    rows.emplace_back(path, load_design_file(path).design);
  for (std::size_t i = 0; i < 4; ++i)
    rows.emplace_back("xi_" + cs.names[i], cs.designs[i]);

  std::cout << "design,D,E,D1,ce\n";
  for (const auto& [name, design] : rows) {
    std::cout << name;
    for (std::size_t b = 0; b < 4; ++b)
      std::cout << ','
                << fmt(efficiency(design, cs.criteria[b], cs.designs[b], p.model,
                                  convention), 2);
    std::cout << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const std::string& design_path, const SimConfig& config,
                 const std::string& csv_path) {
  const DesignFile file = load_design_file(design_path);
  const SimReport report = run_simulation(file.design, file.model, config, csv_path);
  std::cout << to_json(report).dump(2) << "\n";
  return kExitOk;
}

int cmd_round(const std::string& design_path, int n) {
  const DesignFile file = load_design_file(design_path);
  const auto counts = apportion(file.design, n);
  std::cout << "point,weight,count\n";
  for (std::size_t i = 0; i < counts.size(); ++i)
    std::cout << fmt(file.design.points[i], 4) << ','
              << fmt(file.design.weights[i], 4) << ',' << counts[i] << '\n';
  return kExitOk;
}

int cmd_chebpoints(const ProblemArgs& args) {
  const Problem problem = resolve_problem(args);
  const ChebyshevSolution sol = chebyshev_points(problem.model, problem.space);
  nlohmann::json j;
  j["points"] = sol.points;
  j["coefficients"] = {sol.coefficients[0], sol.coefficients[1], sol.coefficients[2]};
  j["level"] = sol.level;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"locally optimal designs for inverse quadratic regression models"};
  app.require_subcommand(1);

  ProblemArgs design_args;
  std::string design_out = "design.json";
  double design_tol = 1e-7;
  auto* design_cmd = app.add_subcommand("design", "compute an optimal design");
  add_problem_flags(design_cmd, design_args, true);
  design_cmd->add_option("--out", design_out, "output design JSON path");
  design_cmd->add_option("--tolerance", design_tol, "equivalence tolerance");

  ProblemArgs check_args;
  std::string check_design;
  double check_tol = 1e-6;
  auto* check_cmd =
      app.add_subcommand("check", "certify a design file via its equivalence theorem");
  check_cmd->add_option("--design", check_design, "design JSON file")->required();
  check_cmd->add_option("--criterion", check_args.criterion_name, "D, E, D1, ce or c")
      ->required();
  check_cmd->add_option("--xe", check_args.xe, "extrapolation point");
  check_cmd->add_option("--cvec", check_args.cvec_csv, "c-vector for --criterion c");
  check_cmd->add_option("--preset", check_args.preset_name,
                        "preset supplying the default extrapolation point");
  check_cmd->add_option("--tolerance", check_tol, "pass/fail tolerance");

  std::string table_preset = "landete", table_outdir = ".", table_conv = "sqrt";
  auto* table_cmd = app.add_subcommand("table", "emit the case-study tables as CSV");
  table_cmd->add_option("--preset", table_preset, "named preset");
  table_cmd->add_option("--outdir", table_outdir, "output directory");
  table_cmd->add_option("--d-convention", table_conv,
                        "D-efficiency convention: sqrt, ratio or cuberoot");

  std::string eff_preset = "landete", eff_conv = "sqrt";
  std::vector<std::string> eff_designs;
  auto* eff_cmd =
      app.add_subcommand("efficiency", "efficiency matrix of designs by criteria");
  eff_cmd->add_option("--preset", eff_preset, "named preset");
  eff_cmd->add_option("--design", eff_designs, "extra design JSON files to score");
  eff_cmd->add_option("--d-convention", eff_conv, "D-efficiency convention");

  std::string sim_design, sim_csv;
  SimConfig sim_config;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo covariance check");
  sim_cmd->add_option("--design", sim_design, "design JSON file")->required();
  sim_cmd->add_option("--sigma", sim_config.sigma, "noise standard deviation")
      ->required();
  sim_cmd->add_option("--n", sim_config.n_runs, "observations per replicate")
      ->required();
  sim_cmd->add_option("--replicates", sim_config.replicates, "number of replicates")
      ->required();
  sim_cmd->add_option("--seed", sim_config.seed, "RNG seed (required)")->required();
  sim_cmd->add_option("--max-fit-iterations", sim_config.max_fit_iterations,
                      "Gauss-Newton iteration cap");
  sim_cmd->add_option("--csv", sim_csv, "per-replicate estimate dump");

  std::string round_design;
  int round_n = 0;
  auto* round_cmd = app.add_subcommand("round", "apportion weights to integer counts");
  round_cmd->add_option("--design", round_design, "design JSON file")->required();
  round_cmd->add_option("--n", round_n, "total observation count")->required();

  ProblemArgs cheb_args;
  auto* cheb_cmd =
      app.add_subcommand("chebpoints", "equioscillation points and coefficients");
  add_problem_flags(cheb_cmd, cheb_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (design_cmd->parsed()) return cmd_design(design_args, design_out, design_tol);
    if (check_cmd->parsed()) return cmd_check(check_design, check_args, check_tol);
    if (table_cmd->parsed())
      return cmd_table(table_preset, table_outdir, parse_convention(table_conv));
    if (eff_cmd->parsed())
      return cmd_efficiency(eff_preset, eff_designs, parse_convention(eff_conv));
    if (sim_cmd->parsed()) return cmd_simulate(sim_design, sim_config, sim_csv);
    if (round_cmd->parsed()) return cmd_round(round_design, round_n);
    if (cheb_cmd->parsed()) return cmd_chebpoints(cheb_args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NotEstimable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const UnsupportedSpace& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const UnsupportedCriterion& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InfeasibleApportionment& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InsufficientDesign& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

// Command-line front end: simulate scenarios, evaluate steady-state MSE
// bounds, solve communication-resource allocations, and generate or check
// network topologies. See README.md for the config schema.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "actc/allocation.hpp"
#include "actc/errors.hpp"
#include "actc/harness.hpp"
#include "actc/rng.hpp"
#include "actc/theory.hpp"
#include "actc/topology.hpp"

namespace {

using nlohmann::json;

int env_threads() {
  const char* value = std::getenv("ACTC_THREADS");
  if (!value) return 0;
  return std::atoi(value);
}

actc::harness::ScenarioConfig resolve_scenario(const std::string& config_path,
                                               const std::string& preset) {
  if (!config_path.empty()) return actc::harness::load_config(config_path);
  if (!preset.empty()) return actc::harness::preset(preset);
  throw actc::ConfigError("pass --config FILE or --preset NAME");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) values.push_back(std::stod(cell));
  }
  return values;
}

int run_simulate(const std::string& config_path, const std::string& preset,
                 int runs, long long seed, const std::string& outdir,
                 int threads) {
  const actc::harness::ScenarioConfig config =
      resolve_scenario(config_path, preset);
  const actc::harness::SimulationResult result =
      actc::harness::simulate(config, outdir, runs, seed, threads);
  for (const std::string& file : result.files) {
    std::cout << file << "\n";
  }
  return 0;
}

int run_theory(const std::string& config_path, const std::string& preset) {
  const actc::harness::ScenarioConfig config =
      resolve_scenario(config_path, preset);
  const actc::harness::BuiltScenario scenario = actc::harness::build(config);

  json report;
  report["name"] = config.name;
  report["zeta"] = config.zeta;
  report["mu_max"] = scenario.mu_max;
  report["nu"] = scenario.nu;
  json perron = json::array();
  json alphas = json::array();
  json coefficients = json::array();
  for (int k = 0; k < scenario.problem.num_agents(); ++k) {
    perron.push_back(scenario.perron[k]);
    alphas.push_back(scenario.alphas[k]);
    coefficients.push_back(actc::model::distortion_coefficient(
        scenario.problem, k, scenario.alphas));
  }
  report["perron"] = perron;
  report["alphas"] = alphas;
  report["distortion_coefficients"] = coefficients;

  for (const auto& arm : scenario.arms) {
    Eigen::VectorXd omegas(scenario.problem.num_agents());
    for (int k = 0; k < scenario.problem.num_agents(); ++k) {
      omegas[k] = actc::compression::omega(arm.run_config.specs[k]);
    }
    const double ds = actc::theory::delta_s(scenario.problem, scenario.perron,
                                            scenario.alphas, config.zeta);
    const double dw = actc::theory::delta_omega(
        scenario.problem, scenario.perron, scenario.alphas, config.zeta,
        omegas, scenario.nu, config.theory_constant_c);
    const actc::theory::TheoryBounds bounds = actc::theory::mse_bounds(
        scenario.mu_max, ds, dw,
        actc::theory::network_error_term(config.theory_constant_c, config.zeta,
                                         scenario.nu));
    json arm_report;
    arm_report["delta_s"] = bounds.delta_s;
    arm_report["delta_omega"] = bounds.delta_omega;
    arm_report["lower"] = bounds.lower;
    arm_report["upper"] = bounds.upper;
    arm_report["lower_db"] = actc::harness::db(bounds.lower);
    arm_report["upper_db"] = actc::harness::db(bounds.upper);
    report["arms"][arm.label] = arm_report;
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_allocate(const std::string& family, double budget, double x_min,
                 double x_max, int dim, const std::string& perron_text,
                 const std::string& distortion_text, bool repair) {
  const std::vector<double> perron = parse_list(perron_text);
  const std::vector<double> distortions = parse_list(distortion_text);
  if (perron.size() != distortions.size() || perron.empty()) {
    throw actc::ConfigError("--perron and --distortions need equal lengths");
  }
  actc::allocation::AllocationProblem problem;
  problem.n = static_cast<int>(perron.size());
  problem.budget = budget;
  problem.x_min = x_min;
  problem.x_max = x_max;
  problem.perron = Eigen::Map<const Eigen::VectorXd>(perron.data(),
                                                     problem.n);
  problem.distortions =
      Eigen::Map<const Eigen::VectorXd>(distortions.data(), problem.n);
  problem.dim = dim;
  if (family == "quantizer") {
    problem.family = actc::allocation::Family::kQuantizerHighRes;
  } else if (family == "quantizer_pow2") {
    problem.family = actc::allocation::Family::kQuantizerPow2;
  } else if (family == "sparsifier") {
    problem.family = actc::allocation::Family::kSparsifier;
  } else {
    throw actc::ConfigError("unknown family '" + family + "'");
  }

  const actc::allocation::AllocationSolution solution =
      actc::allocation::solve_kkt(problem);
  const Eigen::VectorXi repaired =
      actc::allocation::round_to_integer(problem, solution.x_real, repair);
  const actc::allocation::KktReport report =
      actc::allocation::verify_kkt(problem, solution);

  json out;
  out["family"] = family;
  out["budget"] = budget;
  out["box"] = {x_min, x_max};
  json x_real = json::array();
  json x_int = json::array();
  for (int k = 0; k < problem.n; ++k) {
    x_real.push_back(solution.x_real[k]);
    x_int.push_back(repaired[k]);
  }
  out["x_real"] = x_real;
  out["x_int"] = x_int;
  out["lambda0"] = solution.lambda0;
  out["objective_real"] = solution.objective_real;
  out["objective_int"] =
      actc::allocation::objective(problem, repaired.cast<double>());
  out["kkt"] = {{"stationarity", report.stationarity},
                {"primal", report.primal},
                {"dual", report.dual},
                {"complementarity", report.complementarity},
                {"ok", report.ok()}};
  std::cout << out.dump(2) << "\n";

  std::fprintf(stderr, "%-6s %12s %8s\n", "agent", "x_real", "x_int");
  for (int k = 0; k < problem.n; ++k) {
    std::fprintf(stderr, "%-6d %12.6f %8d\n", k, solution.x_real[k],
                 repaired[k]);
  }
  return 0;
}

int run_topology_gen(int nodes, int attachment_edges, long long seed,
                     const std::string& out_path) {
  actc::Rng rng(static_cast<std::uint64_t>(seed));
  const actc::topology::Adjacency adjacency =
      actc::topology::bollobas_riordan(nodes, attachment_edges, rng);
  if (out_path.empty()) {
    actc::topology::write_edge_list(std::cout, adjacency);
  } else {
    std::ofstream out(out_path);
    if (!out) throw actc::IoError("cannot write " + out_path);
    actc::topology::write_edge_list(out, adjacency);
    std::cout << out_path << "\n";
  }
  return 0;
}

int run_topology_check(const std::string& matrix_path,
                       const std::string& edges_path,
                       const std::string& rule) {
  Eigen::MatrixXd a;
  if (!matrix_path.empty()) {
    std::ifstream in(matrix_path);
    if (!in) throw actc::IoError("cannot open " + matrix_path);
    a = actc::topology::read_matrix_csv(in);
  } else if (!edges_path.empty()) {
    std::ifstream in(edges_path);
    if (!in) throw actc::IoError("cannot open " + edges_path);
    const actc::topology::Adjacency adjacency =
        actc::topology::read_edge_list(in);
    const actc::topology::CombinationMatrix matrix =
        rule == "relative_degree"
            ? actc::topology::relative_degree_rule(adjacency)
            : actc::topology::averaging_rule(adjacency);
    a = matrix.matrix();
  } else {
    throw actc::ConfigError("pass --matrix FILE or --edges FILE");
  }
  const actc::topology::CombinationMatrix matrix = actc::topology::validate(a);
  const actc::topology::PerronVector pv = actc::topology::perron(matrix);

  json out;
  out["n"] = matrix.size();
  out["valid"] = true;
  json perron = json::array();
  for (int k = 0; k < matrix.size(); ++k) perron.push_back(pv.pi[k]);
  out["perron"] = perron;
  out["residual_inf"] =
      (matrix.matrix() * pv.pi - pv.pi).cwiseAbs().maxCoeff();
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed adaptive regression with compressed diffusion"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset_name;
  std::string outdir = "out";
  int runs = 0;
  long long seed = -1;
  int threads = env_threads();

  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario");
  simulate->add_option("--config", config_path, "scenario config JSON");
  simulate->add_option("--preset", preset_name,
                       "fig1 | fig3_quantizer | fig3_sparsifier");
  simulate->add_option("--runs", runs, "override Monte Carlo run count");
  simulate->add_option("--seed", seed, "override master seed");
  simulate->add_option("--out", outdir, "output directory");
  simulate->add_option("--threads", threads,
                       "worker threads (default: ACTC_THREADS or auto)");

  CLI::App* theory = app.add_subcommand("theory", "print steady-state bounds");
  theory->add_option("--config", config_path, "scenario config JSON");
  theory->add_option("--preset", preset_name, "preset name");

  std::string family = "quantizer";
  double budget = 0.0;
  double x_min = 1.0;
  double x_max = 0.0;
  int dim = 0;
  std::string perron_text;
  std::string distortion_text;
  bool repair = false;
  CLI::App* allocate =
      app.add_subcommand("allocate", "solve a resource allocation");
  allocate->add_option("--family", family,
                       "quantizer | quantizer_pow2 | sparsifier");
  allocate->add_option("--budget", budget, "total resource budget")
      ->required();
  allocate->add_option("--x-min", x_min, "per-agent lower bound");
  allocate->add_option("--x-max", x_max, "per-agent upper bound")->required();
  allocate->add_option("--dim", dim, "vector dimension")->required();
  allocate->add_option("--perron", perron_text, "comma-separated weights")
      ->required();
  allocate
      ->add_option("--distortions", distortion_text,
                   "comma-separated distortion coefficients")
      ->required();
  allocate->add_flag("--repair", repair,
                     "greedily hand out leftover integer budget");

  CLI::App* topo = app.add_subcommand("topology", "generate or check graphs");
  topo->require_subcommand(1);
  int nodes = 10;
  int attachment_edges = 1;
  long long topo_seed = 1;
  std::string topo_out;
  CLI::App* gen = topo->add_subcommand("gen", "preferential-attachment graph");
  gen->add_option("--n", nodes, "node count")->required();
  gen->add_option("--edges", attachment_edges, "attachment edges per node");
  gen->add_option("--seed", topo_seed, "generator seed");
  gen->add_option("--out", topo_out, "edge-list path (default stdout)");

  std::string matrix_path;
  std::string edges_path;
  std::string rule = "averaging";
  CLI::App* chk = topo->add_subcommand("check", "validate a combination matrix");
  chk->add_option("--matrix", matrix_path, "dense CSV combination matrix");
  chk->add_option("--edges", edges_path, "edge-list file");
  chk->add_option("--rule", rule, "averaging | relative_degree");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return run_simulate(config_path, preset_name, runs, seed, outdir,
                          threads);
    }
    if (theory->parsed()) return run_theory(config_path, preset_name);
    if (allocate->parsed()) {
      return run_allocate(family, budget, x_min, x_max, dim, perron_text,
                          distortion_text, repair);
    }
    if (topo->parsed()) {
      if (gen->parsed()) {
        return run_topology_gen(nodes, attachment_edges, topo_seed, topo_out);
      }
      if (chk->parsed()) {
        return run_topology_check(matrix_path, edges_path, rule);
      }
    }
  } catch (const actc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

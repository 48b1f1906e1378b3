#include "actc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string_view>
#include <utility>

#include "actc/compression.hpp"
#include "actc/errors.hpp"
#include "actc/theory.hpp"

namespace actc::harness {

namespace {

using nlohmann::json;

// Sub-streams of the scenario seed, so the drawn problem, topology and
// Monte Carlo data are independent. Run indices occupy the small stream
// ids inside diffusion::run.
constexpr std::uint64_t kProblemStream = 0x70726f626c656dull;   // "problem"
constexpr std::uint64_t kTopologyStream = 0x746f706f6c6full;    // "topolo"
constexpr std::uint64_t kMinimizerStream = 0x775f74727565ull;   // "w_true"

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string hex_hash(std::uint64_t value) {
  char buffer[19];
  std::snprintf(buffer, sizeof(buffer), "0x%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ConfigError(std::string("missing numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Eigen::MatrixXd covariance_from_json(const json& j, int dim) {
  if (j.is_object() && j.contains("scalar")) {
    return model::scaled_identity(dim, j.at("scalar").get<double>());
  }
  if (j.is_object() && j.contains("diagonal")) {
    const Eigen::VectorXd diag = vector_from_json(j.at("diagonal"));
    if (diag.size() != dim) {
      throw ConfigError("diagonal covariance length differs from dim");
    }
    return model::diagonal_covariance(diag);
  }
  if (j.is_object() && j.contains("full")) {
    const json& rows = j.at("full");
    Eigen::MatrixXd m(rows.size(), rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows.at(r).size() != rows.size()) {
        throw ConfigError("full covariance must be square");
      }
      for (std::size_t c = 0; c < rows.at(r).size(); ++c) {
        m(r, c) = rows.at(r).at(c).get<double>();
      }
    }
    if (static_cast<int>(rows.size()) != dim) {
      throw ConfigError("full covariance size differs from dim");
    }
    return m;
  }
  throw ConfigError("covariance must give 'scalar', 'diagonal' or 'full'");
}

model::RegressionProblem build_problem(const ScenarioConfig& config) {
  const json& spec = config.problem;
  if (!spec.is_object()) throw ConfigError("missing problem section");
  const int dim = static_cast<int>(require_number(spec, "dim"));

  std::vector<model::AgentModel> agents;
  if (spec.contains("agents")) {
    for (const json& a : spec.at("agents")) {
      agents.push_back(model::make_agent(
          covariance_from_json(a.at("r_u"), dim),
          require_number(a, "sigma2_v"), require_number(a, "step_size")));
    }
  } else if (spec.contains("generator")) {
    const json& gen = spec.at("generator");
    const int n = static_cast<int>(require_number(gen, "num_agents"));
    if (n < 1) throw ConfigError("generator needs num_agents >= 1");
    const json& rv = gen.at("regressor_variance_range");
    const json& nv = gen.at("noise_variance_range");
    const double r_lo = rv.at(0).get<double>();
    const double r_hi = rv.at(1).get<double>();
    const double n_lo = nv.at(0).get<double>();
    const double n_hi = nv.at(1).get<double>();
    const double step = require_number(gen, "step_size");
    Rng rng(config.seed, kProblemStream);
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd diag(dim);
      for (int m = 0; m < dim; ++m) {
        diag[m] = r_lo + (r_hi - r_lo) * rng.uniform();
      }
      const double sigma2 = n_lo + (n_hi - n_lo) * rng.uniform();
      agents.push_back(model::make_agent(model::diagonal_covariance(diag),
                                         sigma2, step));
    }
  } else {
    throw ConfigError("problem needs 'agents' or 'generator'");
  }

  Eigen::VectorXd w_true;
  if (spec.contains("w_true")) {
    w_true = vector_from_json(spec.at("w_true"));
    if (w_true.size() != dim) {
      throw ConfigError("w_true length differs from dim");
    }
  } else {
    Rng rng(config.seed, kMinimizerStream);
    w_true.resize(dim);
    for (int m = 0; m < dim; ++m) w_true[m] = rng.normal();
  }
  return model::make_problem(std::move(w_true), std::move(agents));
}

topology::CombinationMatrix build_matrix(const ScenarioConfig& config,
                                         int num_agents) {
  const json& spec = config.topology;
  if (!spec.is_object()) throw ConfigError("missing topology section");

  if (spec.contains("matrix")) {
    const json& rows = spec.at("matrix");
    Eigen::MatrixXd a(rows.size(), rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < rows.at(r).size(); ++c) {
        a(r, c) = rows.at(r).at(c).get<double>();
      }
    }
    return topology::validate(a);
  }

  topology::Adjacency adjacency(num_agents);
  if (spec.contains("edges")) {
    for (const json& e : spec.at("edges")) {
      adjacency.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    }
    if (spec.value("add_self_loops", false)) adjacency.add_self_loops();
  } else if (spec.contains("generator")) {
    const json& gen = spec.at("generator");
    const std::string type = gen.value("type", "preferential_attachment");
    if (type != "preferential_attachment") {
      throw ConfigError("unknown topology generator '" + type + "'");
    }
    Rng rng(config.seed, kTopologyStream);
    adjacency = topology::bollobas_riordan(
        num_agents, gen.value("attachment_edges", 1), rng);
  } else {
    throw ConfigError("topology needs 'matrix', 'edges' or 'generator'");
  }

  const std::string rule = spec.value("rule", "averaging");
  if (rule == "averaging") return topology::averaging_rule(adjacency);
  if (rule == "relative_degree") {
    return topology::relative_degree_rule(adjacency);
  }
  throw ConfigError("unknown combination rule '" + rule + "'");
}

compression::Family compression_family(const std::string& name) {
  if (name == "identity") return compression::Family::kIdentity;
  if (name == "quantizer") return compression::Family::kRandomizedQuantizer;
  if (name == "sparsifier") return compression::Family::kRandomizedSparsifier;
  throw ConfigError("unknown compression family '" + name + "'");
}

allocation::Family allocation_family(const std::string& name) {
  if (name == "quantizer") return allocation::Family::kQuantizerHighRes;
  if (name == "quantizer_pow2") return allocation::Family::kQuantizerPow2;
  if (name == "sparsifier") return allocation::Family::kSparsifier;
  throw ConfigError("unknown allocation family '" + name + "'");
}

compression::CompressionSpec make_spec(compression::Family family, int dim,
                                       int resource, int norm_bits) {
  switch (family) {
    case compression::Family::kIdentity:
      return compression::CompressionSpec::identity(dim, norm_bits);
    case compression::Family::kRandomizedQuantizer:
      return compression::CompressionSpec::quantizer(dim, resource,
                                                     norm_bits);
    case compression::Family::kRandomizedSparsifier:
      return compression::CompressionSpec::sparsifier(dim, resource,
                                                      norm_bits);
  }
  throw ConfigError("unknown compression family");
}

// Integer allocation -> compressor lineup for the adaptive arms.
std::vector<compression::CompressionSpec> lineup_from_allocation(
    allocation::Family family, int dim, int norm_bits,
    const Eigen::VectorXi& x) {
  const bool sparsify = family == allocation::Family::kSparsifier;
  std::vector<compression::CompressionSpec> specs;
  specs.reserve(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    specs.push_back(
        sparsify
            ? compression::CompressionSpec::sparsifier(dim, x[k], norm_bits)
            : compression::CompressionSpec::quantizer(dim, x[k], norm_bits));
  }
  return specs;
}

}  // namespace

json to_json(const ScenarioConfig& config) {
  json j;
  j["name"] = config.name;
  j["seed"] = config.seed;
  j["runs"] = config.runs;
  j["horizon"] = config.horizon;
  j["zeta"] = config.zeta;
  j["steady_state_window"] = config.steady_state_window;
  j["theory_constant_c"] = config.theory_constant_c;
  j["atc_baseline"] = config.atc_baseline;
  j["problem"] = config.problem;
  j["topology"] = config.topology;
  j["compression"] = config.compression;
  return j;
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig config;
  config.name = j.value("name", std::string("custom"));
  config.seed = j.value("seed", std::uint64_t{1});
  config.runs = j.value("runs", 200);
  config.horizon = j.value("horizon", 2000);
  config.zeta = j.value("zeta", 0.1);
  config.steady_state_window = j.value("steady_state_window", 0.2);
  config.theory_constant_c = j.value("theory_constant_c", 0.0);
  config.atc_baseline = j.value("atc_baseline", false);
  if (!j.contains("problem") || !j.contains("topology") ||
      !j.contains("compression")) {
    throw ConfigError("config needs problem, topology and compression");
  }
  config.problem = j.at("problem");
  config.topology = j.at("topology");
  config.compression = j.at("compression");
  if (config.runs < 1) throw ConfigError("runs must be >= 1");
  if (config.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(config.zeta > 0.0 && config.zeta <= 1.0)) {
    throw ConfigError("zeta must lie in (0, 1]");
  }
  if (!(config.steady_state_window > 0.0 &&
        config.steady_state_window <= 1.0)) {
    throw ConfigError("steady_state_window must lie in (0, 1]");
  }
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json j;
  in >> j;
  return config_from_json(j);
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig config;
  config.name = name;
  if (name == "fig1") {
    config.seed = 17;
    config.runs = 200;
    config.horizon = 2000;
    config.zeta = 0.1;
    config.atc_baseline = true;
    config.problem = {
        {"dim", 30},
        {"generator",
         {{"num_agents", 10},
          {"regressor_variance_range", {1.0, 4.0}},
          {"noise_variance_range", {0.25, 1.0}},
          {"step_size", 0.01}}}};
    // Fixed well-mixed mesh: a circulant core (steps 1, 2 and 5) plus two
    // extra chords. Every agent has 5-6 neighbors plus its self-loop, so
    // the network averages fast enough that the per-agent errors stay
    // coordinated.
    json edges = json::array();
    auto undirected = [&edges](int a, int b) {
      edges.push_back({a, b});
      edges.push_back({b, a});
    };
    for (int k = 0; k < 10; ++k) {
      undirected(k, (k + 1) % 10);
      undirected(k, (k + 2) % 10);
    }
    for (int k = 0; k < 5; ++k) undirected(k, k + 5);
    undirected(0, 3);
    undirected(4, 8);
    config.topology = {
        {"edges", edges}, {"add_self_loops", true}, {"rule", "averaging"}};
    config.compression = {{"mode", "sweep"},
                          {"family", "quantizer"},
                          {"resources", {2, 4, 6, 8}},
                          {"norm_bits", 32}};
    return config;
  }
  if (name == "fig3_quantizer" || name == "fig3_sparsifier") {
    // The seed fixes a preferential-attachment draw whose hub is agent 0,
    // the agent with the strongest regressors and the noisiest data, the
    // regime the adaptive allocation is designed for.
    config.seed = 46;
    config.runs = 200;
    config.horizon = 2000;
    config.zeta = 0.1;
    config.atc_baseline = false;
    // Re-allocation happens at iteration 1600; the trailing 5% window
    // starts after the re-converged phase so steady-state readings do not
    // average over the transition.
    config.steady_state_window = 0.05;
    json agents = json::array();
    const double scales[10] = {5, 2, 1, 1, 2, 1, 1, 1, 1, 1};
    const double noises[10] = {1.0, 0.2, 0.1, 0.1, 0.2,
                               0.1, 0.1, 0.1, 0.1, 0.1};
    for (int k = 0; k < 10; ++k) {
      agents.push_back({{"r_u", {{"scalar", scales[k]}}},
                        {"sigma2_v", noises[k]},
                        {"step_size", 0.01}});
    }
    config.problem = {{"dim", 30}, {"agents", agents}};
    config.topology = {
        {"generator",
         {{"type", "preferential_attachment"}, {"attachment_edges", 1}}},
        {"rule", "relative_degree"}};
    if (name == "fig3_quantizer") {
      config.compression = {{"mode", "adaptive_allocation"},
                            {"family", "quantizer"},
                            {"budget", 20},
                            {"x_min", 1},
                            {"x_max", 11},
                            {"t_opt", 1600},
                            {"forgetting", 0.05},
                            {"uniform_resource", 2},
                            {"norm_bits", 32}};
    } else {
      config.compression = {{"mode", "adaptive_allocation"},
                            {"family", "sparsifier"},
                            {"budget", 150},
                            {"x_min", 1},
                            {"x_max", 30},
                            {"t_opt", 1600},
                            {"forgetting", 0.05},
                            {"uniform_resource", 15},
                            {"norm_bits", 32}};
    }
    return config;
  }
  throw UnknownPreset("no preset named '" + name + "'");
}

BuiltScenario build(const ScenarioConfig& config) {
  BuiltScenario scenario;
  scenario.problem = build_problem(config);
  const int n = scenario.problem.num_agents();
  const int dim = scenario.problem.dim();
  scenario.matrix = build_matrix(config, n);
  if (scenario.matrix.size() != n) {
    throw ConfigError("topology size differs from agent count");
  }
  scenario.perron = topology::perron(scenario.matrix).pi;
  const model::ScaledSteps steps = model::scaled_steps(scenario.problem);
  scenario.mu_max = steps.mu_max;
  scenario.alphas = steps.alphas;
  scenario.nu = model::strong_convexity_constant(scenario.problem,
                                                 scenario.perron,
                                                 scenario.alphas);

  const json& comp = config.compression;
  if (!comp.is_object()) throw ConfigError("missing compression section");
  const std::string mode = comp.value("mode", "uniform");
  const int norm_bits = comp.value("norm_bits", 32);

  auto base_run_config = [&]() {
    diffusion::RunConfig rc;
    rc.problem = scenario.problem;
    rc.matrix = scenario.matrix;
    rc.strategy = diffusion::Strategy::kActc;
    rc.zeta = config.zeta;
    rc.horizon = config.horizon;
    rc.seed = config.seed;
    rc.runs = config.runs;
    return rc;
  };

  if (mode == "uniform" || mode == "per_agent") {
    const compression::Family family =
        compression_family(comp.value("family", "quantizer"));
    std::vector<compression::CompressionSpec> specs;
    if (mode == "uniform") {
      const int resource = comp.value("resource", 1);
      specs.assign(n, make_spec(family, dim, resource, norm_bits));
    } else {
      const json& resources = comp.at("resources");
      if (static_cast<int>(resources.size()) != n) {
        throw ConfigError("per_agent resources must list one value per agent");
      }
      for (const json& r : resources) {
        specs.push_back(make_spec(family, dim, r.get<int>(), norm_bits));
      }
    }
    BuiltScenario::Arm arm;
    arm.label = "actc";
    arm.run_config = base_run_config();
    arm.run_config.specs = specs;
    scenario.arms.push_back(std::move(arm));
  } else if (mode == "sweep") {
    const compression::Family family =
        compression_family(comp.value("family", "quantizer"));
    for (const json& r : comp.at("resources")) {
      const int resource = r.get<int>();
      BuiltScenario::Arm arm;
      arm.label = "actc_r" + std::to_string(resource);
      arm.run_config = base_run_config();
      arm.run_config.specs.assign(n,
                                  make_spec(family, dim, resource, norm_bits));
      scenario.arms.push_back(std::move(arm));
    }
  } else if (mode == "adaptive_allocation") {
    AllocationDirective directive;
    directive.family = allocation_family(comp.value("family", "quantizer"));
    directive.budget = require_number(comp, "budget");
    directive.x_min = require_number(comp, "x_min");
    directive.x_max = require_number(comp, "x_max");
    directive.t_opt = static_cast<int>(require_number(comp, "t_opt"));
    directive.forgetting = comp.value("forgetting", 0.05);
    directive.norm_bits = norm_bits;
    directive.uniform_resource = comp.value(
        "uniform_resource",
        static_cast<int>(std::floor(directive.budget / n)));
    if (directive.t_opt < 1 || directive.t_opt > config.horizon) {
      throw ConfigError("t_opt must lie in [1, horizon]");
    }
    scenario.allocation = directive;

    const bool sparsify =
        directive.family == allocation::Family::kSparsifier;
    const compression::Family family =
        sparsify ? compression::Family::kRandomizedSparsifier
                 : compression::Family::kRandomizedQuantizer;
    std::vector<compression::CompressionSpec> uniform_specs(
        n, make_spec(family, dim, directive.uniform_resource, norm_bits));

    BuiltScenario::Arm uniform_arm;
    uniform_arm.label = "uniform";
    uniform_arm.run_config = base_run_config();
    uniform_arm.run_config.specs = uniform_specs;
    scenario.arms.push_back(std::move(uniform_arm));

    diffusion::ReallocationEvent event;
    event.t_opt = directive.t_opt;
    event.forgetting = directive.forgetting;
    event.rescale = true;
    event.planner = [directive, n, dim](
                        const Eigen::VectorXd& pi_hat,
                        const Eigen::VectorXd& d_hat) {
      allocation::AllocationProblem ap;
      ap.n = n;
      ap.budget = directive.budget;
      ap.x_min = directive.x_min;
      ap.x_max = directive.x_max;
      ap.perron = pi_hat;
      ap.distortions = d_hat.cwiseMax(1e-30);  // estimates are positive
      ap.dim = dim;
      ap.family = directive.family;
      const allocation::AllocationSolution solution = allocation::solve_kkt(ap);
      // Greedy repair spends whole leftover units, so the integer lineup
      // exhausts the bit budget instead of stranding up to n - 1 units.
      const Eigen::VectorXi x =
          allocation::round_to_integer(ap, solution.x_real, true);
      return lineup_from_allocation(directive.family, dim,
                                    directive.norm_bits, x);
    };

    BuiltScenario::Arm adaptive_arm;
    adaptive_arm.label = "adaptive";
    adaptive_arm.run_config = base_run_config();
    adaptive_arm.run_config.specs = uniform_specs;
    adaptive_arm.run_config.reallocation = event;
    scenario.arms.push_back(std::move(adaptive_arm));
  } else {
    throw ConfigError("unknown compression mode '" + mode + "'");
  }

  if (config.atc_baseline) {
    // Rate-matched uncompressed reference: the compressed strategy adapts
    // at the effective rate mu_k * zeta, so the comparable dense baseline
    // runs at those step sizes and settles at the lower bound mu*delta_s.
    BuiltScenario::Arm arm;
    arm.label = "atc";
    arm.run_config = base_run_config();
    arm.run_config.strategy = diffusion::Strategy::kAtc;
    arm.run_config.zeta = 1.0;
    for (model::AgentModel& agent : arm.run_config.problem.agents) {
      agent.step_size *= config.zeta;
    }
    arm.run_config.specs.assign(
        n, compression::CompressionSpec::identity(dim, norm_bits));
    scenario.arms.push_back(std::move(arm));
  }
  return scenario;
}

double db(double x) {
  if (!(x > 0.0)) throw NonPositive("dB of a non-positive value");
  return 10.0 * std::log10(x);
}

double steady_state_mse(const diffusion::Trajectory& trajectory,
                        double window_fraction) {
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
    throw InvalidArgument("window fraction must lie in (0, 1]");
  }
  const int horizon = static_cast<int>(trajectory.network_mse.size()) - 1;
  if (horizon < 1) throw InvalidArgument("trajectory has no iterations");
  const int count = std::max(1, static_cast<int>(std::floor(
                                    window_fraction * horizon)));
  const int start = horizon - count + 1;
  return trajectory.network_mse.segment(start, count).mean();
}

std::uint64_t config_hash(const ScenarioConfig& config) {
  return fnv1a(to_json(config).dump());
}

namespace {

void write_trajectory_csv(const std::string& path,
                          const diffusion::Trajectory& trajectory,
                          const std::string& hash) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "# config_hash=" << hash << "\n";
  const int n = static_cast<int>(trajectory.agent_sq_error.cols());
  out << "iter,mse_net";
  for (int k = 0; k < n; ++k) out << ",mse_agent_" << k;
  out << ",bits_cum\n";
  char buffer[40];
  const int rows = static_cast<int>(trajectory.network_mse.size());
  for (int i = 0; i < rows; ++i) {
    out << i;
    std::snprintf(buffer, sizeof(buffer), "%.17g", trajectory.network_mse[i]);
    out << "," << buffer;
    for (int k = 0; k < n; ++k) {
      std::snprintf(buffer, sizeof(buffer), "%.17g",
                    trajectory.agent_sq_error(i, k));
      out << "," << buffer;
    }
    std::snprintf(buffer, sizeof(buffer), "%.17g",
                  trajectory.bits_cumulative[i]);
    out << "," << buffer << "\n";
  }
}

json theory_for_specs(const BuiltScenario& scenario, double zeta, double c,
                      const std::vector<compression::CompressionSpec>& specs) {
  Eigen::VectorXd omegas(scenario.problem.num_agents());
  for (int k = 0; k < scenario.problem.num_agents(); ++k) {
    omegas[k] = compression::omega(specs[k]);
  }
  const double ds = theory::delta_s(scenario.problem, scenario.perron,
                                    scenario.alphas, zeta);
  const double network_part = theory::network_error_term(c, zeta, scenario.nu);
  const double dw = theory::delta_omega(scenario.problem, scenario.perron,
                                        scenario.alphas, zeta, omegas,
                                        scenario.nu, c);
  const theory::TheoryBounds bounds =
      theory::mse_bounds(scenario.mu_max, ds, dw, network_part);
  json j;
  j["omegas"] = vector_to_json(omegas);
  j["delta_s"] = bounds.delta_s;
  j["delta_omega"] = bounds.delta_omega;
  j["lower"] = bounds.lower;
  j["upper"] = bounds.upper;
  j["lower_db"] = db(bounds.lower);
  j["upper_db"] = db(bounds.upper);
  j["decomposition"] = {
      {"uncompressed", bounds.decomposition.uncompressed},
      {"gradient_noise_compression",
       bounds.decomposition.gradient_noise_compression},
      {"network_error_compression",
       bounds.decomposition.network_error_compression}};
  return j;
}

}  // namespace

SimulationResult simulate(const ScenarioConfig& config_in,
                          const std::string& outdir, int runs_override,
                          std::int64_t seed_override, int threads) {
  ScenarioConfig config = config_in;
  if (runs_override > 0) config.runs = runs_override;
  if (seed_override >= 0) {
    config.seed = static_cast<std::uint64_t>(seed_override);
  }

  BuiltScenario scenario = build(config);
  const std::string hash = hex_hash(config_hash(config));
  std::filesystem::create_directories(outdir);

  SimulationResult result;
  json theory_report;
  theory_report["config_hash"] = hash;
  theory_report["name"] = config.name;
  theory_report["zeta"] = config.zeta;
  theory_report["mu_max"] = scenario.mu_max;
  theory_report["nu"] = scenario.nu;
  theory_report["perron"] = vector_to_json(scenario.perron);
  theory_report["alphas"] = vector_to_json(scenario.alphas);
  Eigen::VectorXd coefficients(scenario.problem.num_agents());
  for (int k = 0; k < scenario.problem.num_agents(); ++k) {
    coefficients[k] =
        model::distortion_coefficient(scenario.problem, k, scenario.alphas);
  }
  theory_report["distortion_coefficients"] = vector_to_json(coefficients);

  for (const BuiltScenario::Arm& arm : scenario.arms) {
    const diffusion::Trajectory trajectory =
        diffusion::run_monte_carlo(arm.run_config, threads);

    const std::string stem = config.name + "_" + arm.label;
    const std::string csv_path =
        (std::filesystem::path(outdir) / (stem + ".csv")).string();
    write_trajectory_csv(csv_path, trajectory, hash);
    result.files.push_back(csv_path);

    json meta;
    meta["config_hash"] = hash;
    meta["name"] = config.name;
    meta["arm"] = arm.label;
    meta["seed"] = config.seed;
    meta["runs"] = config.runs;
    meta["horizon"] = config.horizon;
    meta["num_agents"] = scenario.problem.num_agents();
    meta["dim"] = scenario.problem.dim();
    meta["steady_state_mse"] =
        steady_state_mse(trajectory, config.steady_state_window);
    meta["steady_state_mse_db"] =
        db(steady_state_mse(trajectory, config.steady_state_window));
    meta["final_resources"] = vector_to_json(trajectory.final_resources);
    meta["distortion_estimates_rescaled"] =
        vector_to_json(trajectory.distortion_estimates_rescaled);
    const std::string meta_path =
        (std::filesystem::path(outdir) / (stem + ".meta.json")).string();
    std::ofstream meta_out(meta_path);
    if (!meta_out) throw IoError("cannot write " + meta_path);
    meta_out << meta.dump(2) << "\n";
    result.files.push_back(meta_path);

    // The dense baseline is rate-matched to the scenario's zeta, so its
    // bounds are evaluated with the same zeta as the compressed arms.
    theory_report["arms"][arm.label] = theory_for_specs(
        scenario, config.zeta, config.theory_constant_c, arm.run_config.specs);
  }

  const std::string theory_path =
      (std::filesystem::path(outdir) / (config.name + "_theory.json"))
          .string();
  {
    std::ofstream out(theory_path);
    if (!out) throw IoError("cannot write " + theory_path);
    out << theory_report.dump(2) << "\n";
    result.files.push_back(theory_path);
  }

  if (scenario.allocation) {
    const AllocationDirective& directive = *scenario.allocation;
    allocation::AllocationProblem ap;
    ap.n = scenario.problem.num_agents();
    ap.budget = directive.budget;
    ap.x_min = directive.x_min;
    ap.x_max = directive.x_max;
    ap.perron = scenario.perron;
    ap.distortions = coefficients;
    ap.dim = scenario.problem.dim();
    ap.family = directive.family;
    const allocation::AllocationSolution solution = allocation::solve_kkt(ap);
    const allocation::KktReport report = allocation::verify_kkt(ap, solution);
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(
        ap.n, static_cast<double>(directive.uniform_resource));

    json alloc;
    alloc["config_hash"] = hash;
    alloc["family"] = directive.family == allocation::Family::kSparsifier
                          ? "sparsifier"
                          : "quantizer";
    alloc["budget"] = directive.budget;
    alloc["box"] = {directive.x_min, directive.x_max};
    alloc["t_opt"] = directive.t_opt;
    alloc["perron"] = vector_to_json(ap.perron);
    alloc["distortions"] = vector_to_json(ap.distortions);
    alloc["x_real"] = vector_to_json(solution.x_real);
    json x_int = json::array();
    for (int k = 0; k < ap.n; ++k) x_int.push_back(solution.x_int[k]);
    alloc["x_int"] = x_int;
    const Eigen::VectorXi repaired =
        allocation::round_to_integer(ap, solution.x_real, true);
    json x_rep = json::array();
    for (int k = 0; k < ap.n; ++k) x_rep.push_back(repaired[k]);
    alloc["x_int_repaired"] = x_rep;
    alloc["lambda0"] = solution.lambda0;
    alloc["objective_real"] = solution.objective_real;
    alloc["objective_int"] = solution.objective_int;
    alloc["objective_int_repaired"] =
        allocation::objective(ap, repaired.cast<double>());
    alloc["objective_uniform"] = allocation::objective(ap, uniform);
    alloc["kkt"] = {{"stationarity", report.stationarity},
                    {"primal", report.primal},
                    {"dual", report.dual},
                    {"complementarity", report.complementarity},
                    {"ok", report.ok()}};
    const std::string alloc_path =
        (std::filesystem::path(outdir) / (config.name + "_allocation.json"))
            .string();
    std::ofstream out(alloc_path);
    if (!out) throw IoError("cannot write " + alloc_path);
    out << alloc.dump(2) << "\n";
    result.files.push_back(alloc_path);
  }
  return result;
}

}  // namespace actc::harness

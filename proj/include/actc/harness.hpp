#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "actc/allocation.hpp"
#include "actc/diffusion.hpp"
#include "actc/model.hpp"
#include "actc/topology.hpp"

namespace actc::harness {

// Declarative description of one experiment. The problem / topology /
// compression sections keep their JSON form (see README for the schema);
// build() translates and validates them eagerly.
struct ScenarioConfig {
  std::string name = "custom";
  std::uint64_t seed = 1;
  int runs = 200;
  int horizon = 2000;
  double zeta = 0.1;
  double steady_state_window = 0.2;  // trailing fraction used for averages
  double theory_constant_c = 0.0;
  bool atc_baseline = false;
  nlohmann::json problem;
  nlohmann::json topology;
  nlohmann::json compression;
};

nlohmann::json to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);

// Canonical presets (see README): "fig1" sweeps quantizer resolutions on a
// randomly drawn network, "fig3_quantizer" / "fig3_sparsifier" compare a
// uniform resource split against mid-run adaptive re-allocation on a
// hub-and-spokes network.
ScenarioConfig preset(const std::string& name);

// Mid-run re-allocation directive decoded from the compression section.
struct AllocationDirective {
  allocation::Family family = allocation::Family::kQuantizerHighRes;
  double budget = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  int t_opt = 0;
  double forgetting = 0.05;
  int uniform_resource = 0;  // lineup before t_opt (and the baseline arm)
  int norm_bits = 32;
};

// Fully validated, executable form of a scenario.
struct BuiltScenario {
  model::RegressionProblem problem;
  topology::CombinationMatrix matrix;
  Eigen::VectorXd perron;  // exact Perron weights of the matrix
  Eigen::VectorXd alphas;
  double mu_max = 0.0;
  double nu = 0.0;

  struct Arm {
    std::string label;
    diffusion::RunConfig run_config;
  };
  std::vector<Arm> arms;
  std::optional<AllocationDirective> allocation;
};

BuiltScenario build(const ScenarioConfig& config);

// 10 log10(x); throws NonPositive for x <= 0.
double db(double x);

// Mean network MSE over the trailing window_fraction of iterations.
double steady_state_mse(const diffusion::Trajectory& trajectory,
                        double window_fraction);

// FNV-1a over the canonical JSON dump; embedded in every emitted file.
std::uint64_t config_hash(const ScenarioConfig& config);

struct SimulationResult {
  std::vector<std::string> files;  // paths written, in emission order
};

// Runs every arm of the scenario and writes, per arm, a trajectory CSV
// (columns: iter, mse_net, mse_agent_0..N-1, bits_cum; horizon+1 data rows)
// plus a JSON metadata sidecar, one theory-bounds JSON for the scenario,
// and an allocation report when a re-allocation directive is present.
// Overrides: runs/seed <= 0 keep the config values; threads <= 0 picks the
// hardware concurrency.
SimulationResult simulate(const ScenarioConfig& config,
                          const std::string& outdir, int runs_override = 0,
                          std::int64_t seed_override = -1, int threads = 0);

}  // namespace actc::harness

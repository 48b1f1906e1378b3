#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "actc/compression.hpp"
#include "actc/model.hpp"
#include "actc/rng.hpp"
#include "actc/topology.hpp"

namespace actc::diffusion {

// Per-agent state of the compressed diffusion recursion. Every agent keeps
// its own iterate w, intermediate estimate psi, differential-encoder state
// q_self, and bitwise-identical mirrors of each in-neighbor's encoder state
// (all holders of q_l apply the same broadcast with the same arithmetic).
struct AgentState {
  Eigen::VectorXd w;
  Eigen::VectorXd psi;
  Eigen::VectorXd q_self;
  std::map<int, Eigen::VectorXd> q_neighbors;  // l -> mirror of q_l, l != k
};

struct NetworkState {
  std::vector<AgentState> agents;
  int iter = 0;
};

// q0 empty means all encoder states start at zero. w is the combination of
// the initial encoder states (ascending neighbor order).
NetworkState init(const model::RegressionProblem& problem,
                  const topology::CombinationMatrix& matrix,
                  const std::vector<Eigen::VectorXd>& q0 = {});

// Per-agent diagnostics from one step.
struct StepInfo {
  Eigen::VectorXd delta_norm;     // ||psi_k - q_k||
  Eigen::VectorXd error_norm;     // ||Q(delta_k) - delta_k||
  Eigen::VectorXd innovation_sq;  // ||psi_k - w_k(prev)||^2
};

// One adapt-compress-combine round:
//   psi_k = w_k - mu_k grad_k,
//   q_l  += zeta * Q_l(psi_l - q_l)   applied at l and at every mirror,
//   w_k   = sum_{l in N_k} a_lk q_l   (ascending l).
// Identity compressors broadcast psi_l itself (a dense payload costs the
// same bits), so zeta == 1 reconstructs q_l = psi_l exactly. zeta in (0, 1].
StepInfo actc_step(NetworkState& state,
                   const model::RegressionProblem& problem,
                   const topology::CombinationMatrix& matrix, double zeta,
                   const std::vector<compression::CompressionSpec>& specs,
                   Rng& rng);

// Uncompressed baseline: psi_k = w_k - mu_k grad_k; w_k = sum a_lk psi_l.
// Encoder states are kept equal to psi so the state layout matches; the
// update coincides bitwise with actc_step under identity compressors and
// zeta = 1 on a shared data stream.
StepInfo atc_step(NetworkState& state, const model::RegressionProblem& problem,
                  const topology::CombinationMatrix& matrix, Rng& rng);

// Exponentially smoothed squared innovation: value <- (1 - forgetting) *
// value + forgetting * ||psi - w_prev||^2. At steady state the mean of
// ||psi - w_prev||^2 is approximately 4 mu_k^2 d_k with d_k the agent's
// distortion coefficient, so value / (4 mu_k^2) estimates d_k.
struct DistortionEstimate {
  double value = 0.0;
  double forgetting = 0.05;
};

void update_distortion_estimate(DistortionEstimate& estimate,
                                const Eigen::VectorXd& psi,
                                const Eigen::VectorXd& w_prev);

struct Trajectory {
  Eigen::MatrixXd agent_sq_error;   // (horizon+1) x n, ||w_k - w_true||^2
  Eigen::VectorXd network_mse;      // horizon+1, agent average
  Eigen::VectorXd bits_cumulative;  // horizon+1, exact counts (as double)
  Eigen::VectorXd distortion_estimates;           // raw smoothed values
  Eigen::VectorXd distortion_estimates_rescaled;  // value / (4 mu_k^2)
  Eigen::VectorXd final_resources;  // per-agent resource in effect at the end
};

// Mid-run resource re-allocation: after completing iteration t_opt the
// planner receives the consensus Perron estimate and the rescaled online
// distortion estimates and returns the compressor lineup for the remaining
// iterations. Encoder states are kept across the swap.
struct ReallocationEvent {
  int t_opt = 0;
  std::function<std::vector<compression::CompressionSpec>(
      const Eigen::VectorXd& perron_estimate,
      const Eigen::VectorXd& distortion_estimates)>
      planner;
  double forgetting = 0.05;
  bool rescale = true;  // feed estimates divided by 4 mu_k^2
};

enum class Strategy { kActc, kAtc };

struct RunConfig {
  model::RegressionProblem problem;
  topology::CombinationMatrix matrix;
  Strategy strategy = Strategy::kActc;
  double zeta = 1.0;  // in (0, 1]
  std::vector<compression::CompressionSpec> specs;  // one per agent
  int horizon = 0;
  std::uint64_t seed = 0;
  int runs = 1;
  std::optional<ReallocationEvent> reallocation;
  std::vector<Eigen::VectorXd> q0;  // optional initial encoder states
};

using Observer = std::function<void(int iter, const NetworkState& state)>;

// Single realization; the random stream is derived from (config.seed,
// run_index) so runs are independent and individually reproducible. The
// observer, when given, fires after initialization (iter 0) and after each
// completed iteration.
Trajectory run(const RunConfig& config, int run_index,
               const Observer& observer = nullptr);

// Average of config.runs independent realizations, accumulated in run
// order after collection so the result is byte-identical for any thread
// count. threads <= 0 picks the hardware concurrency.
Trajectory run_monte_carlo(const RunConfig& config, int threads = 0);

}  // namespace actc::diffusion

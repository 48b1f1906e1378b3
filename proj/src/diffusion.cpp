#include "actc/diffusion.hpp"

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>
#include <utility>

#include "actc/errors.hpp"

namespace actc::diffusion {

namespace {

void check_network(const model::RegressionProblem& problem,
                   const topology::CombinationMatrix& matrix) {
  if (matrix.size() != problem.num_agents()) {
    throw DimensionMismatch("matrix size must match agent count");
  }
}

void check_specs(const model::RegressionProblem& problem,
                 const std::vector<compression::CompressionSpec>& specs) {
  if (static_cast<int>(specs.size()) != problem.num_agents()) {
    throw DimensionMismatch("one compressor spec per agent required");
  }
  for (const compression::CompressionSpec& spec : specs) {
    if (spec.dim != problem.dim()) {
      throw DimensionMismatch("compressor dimension must match the problem");
    }
  }
}

// w_k = sum_{l in N_k} a_lk q_l, accumulated in ascending neighbor order
// so the result is bitwise reproducible.
void combine(NetworkState& state, const topology::CombinationMatrix& matrix) {
  const int n = matrix.size();
  for (int k = 0; k < n; ++k) {
    AgentState& agent = state.agents[k];
    agent.w.setZero();
    for (int l : matrix.in_neighbors(k)) {
      const Eigen::VectorXd& q =
          (l == k) ? agent.q_self : agent.q_neighbors.at(l);
      agent.w += matrix(l, k) * q;
    }
  }
}

// Applies agent l's broadcast to one stored copy of q_l. Every holder runs
// this exact arithmetic on bitwise-identical inputs, which keeps mirrors
// exactly consistent. Identity payloads carry psi_l itself, making the
// zeta == 1 update an exact assignment.
void apply_broadcast(Eigen::VectorXd& q, const Eigen::VectorXd& payload,
                     double zeta, bool identity_payload) {
  if (identity_payload) {
    if (zeta == 1.0) {
      q = payload;
    } else {
      q += zeta * (payload - q);
    }
  } else {
    q += zeta * payload;
  }
}

double resource_of(const compression::CompressionSpec& spec) {
  switch (spec.family) {
    case compression::Family::kRandomizedQuantizer:
      return static_cast<double>(spec.levels_bits);
    case compression::Family::kRandomizedSparsifier:
      return static_cast<double>(spec.kept_components);
    case compression::Family::kIdentity:
      return static_cast<double>(spec.dim);
  }
  return 0.0;
}

}  // namespace

NetworkState init(const model::RegressionProblem& problem,
                  const topology::CombinationMatrix& matrix,
                  const std::vector<Eigen::VectorXd>& q0) {
  check_network(problem, matrix);
  const int n = problem.num_agents();
  const int dim = problem.dim();
  if (!q0.empty() && static_cast<int>(q0.size()) != n) {
    throw DimensionMismatch("one initial encoder state per agent required");
  }
  NetworkState state;
  state.agents.resize(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd init_q =
        q0.empty() ? Eigen::VectorXd::Zero(dim) : q0[k];
    if (init_q.size() != dim) {
      throw DimensionMismatch("initial encoder state has wrong dimension");
    }
    state.agents[k].q_self = init_q;
    state.agents[k].w = Eigen::VectorXd::Zero(dim);
    state.agents[k].psi = init_q;
  }
  for (int k = 0; k < n; ++k) {
    for (int l : matrix.in_neighbors(k)) {
      if (l != k) {
        state.agents[k].q_neighbors[l] = state.agents[l].q_self;
      }
    }
  }
  combine(state, matrix);
  state.iter = 0;
  return state;
}

StepInfo actc_step(NetworkState& state,
                   const model::RegressionProblem& problem,
                   const topology::CombinationMatrix& matrix, double zeta,
                   const std::vector<compression::CompressionSpec>& specs,
                   Rng& rng) {
  check_network(problem, matrix);
  check_specs(problem, specs);
  if (!(zeta > 0.0 && zeta <= 1.0)) {
    throw InvalidArgument("zeta must lie in (0, 1]");
  }
  const int n = problem.num_agents();
  StepInfo info;
  info.delta_norm.resize(n);
  info.error_norm.resize(n);
  info.innovation_sq.resize(n);

  // Adapt, compress, broadcast. Agent l's phase only reads its own w and
  // q_self (untouched until the combine below), so broadcasts may be
  // applied as they are produced.
  for (int l = 0; l < n; ++l) {
    AgentState& sender = state.agents[l];
    const model::Observation obs = model::sample_observation(problem, l, rng);
    const Eigen::VectorXd grad =
        model::stochastic_gradient(obs.regressor, obs.response, sender.w);
    sender.psi = sender.w - problem.agents[l].step_size * grad;
    info.innovation_sq[l] = (sender.psi - sender.w).squaredNorm();

    const Eigen::VectorXd delta = sender.psi - sender.q_self;
    info.delta_norm[l] = delta.norm();

    const bool identity_payload =
        specs[l].family == compression::Family::kIdentity;
    Eigen::VectorXd payload;
    if (identity_payload) {
      payload = sender.psi;
      info.error_norm[l] = 0.0;
    } else {
      payload = compression::compress(specs[l], delta, rng);
      info.error_norm[l] = (payload - delta).norm();
    }

    apply_broadcast(sender.q_self, payload, zeta, identity_payload);
    for (int k : matrix.out_neighbors(l)) {
      if (k != l) {
        apply_broadcast(state.agents[k].q_neighbors.at(l), payload, zeta,
                        identity_payload);
      }
    }
  }

  combine(state, matrix);
  state.iter += 1;
  return info;
}

StepInfo atc_step(NetworkState& state, const model::RegressionProblem& problem,
                  const topology::CombinationMatrix& matrix, Rng& rng) {
  check_network(problem, matrix);
  const int n = problem.num_agents();
  StepInfo info;
  info.delta_norm.resize(n);
  info.error_norm.setZero(n);
  info.innovation_sq.resize(n);

  for (int l = 0; l < n; ++l) {
    AgentState& sender = state.agents[l];
    const model::Observation obs = model::sample_observation(problem, l, rng);
    const Eigen::VectorXd grad =
        model::stochastic_gradient(obs.regressor, obs.response, sender.w);
    sender.psi = sender.w - problem.agents[l].step_size * grad;
    info.innovation_sq[l] = (sender.psi - sender.w).squaredNorm();
    info.delta_norm[l] = (sender.psi - sender.q_self).norm();

    sender.q_self = sender.psi;
    for (int k : matrix.out_neighbors(l)) {
      if (k != l) state.agents[k].q_neighbors.at(l) = sender.psi;
    }
  }

  combine(state, matrix);
  state.iter += 1;
  return info;
}

void update_distortion_estimate(DistortionEstimate& estimate,
                                const Eigen::VectorXd& psi,
                                const Eigen::VectorXd& w_prev) {
  if (psi.size() != w_prev.size()) {
    throw DimensionMismatch("psi and w dimensions differ");
  }
  if (!(estimate.forgetting > 0.0 && estimate.forgetting <= 1.0)) {
    throw InvalidArgument("forgetting factor must lie in (0, 1]");
  }
  estimate.value = (1.0 - estimate.forgetting) * estimate.value +
                   estimate.forgetting * (psi - w_prev).squaredNorm();
}

Trajectory run(const RunConfig& config, int run_index,
               const Observer& observer) {
  check_network(config.problem, config.matrix);
  if (config.horizon < 0) throw InvalidArgument("horizon must be >= 0");
  const int n = config.problem.num_agents();
  const int dim = config.problem.dim();

  std::vector<compression::CompressionSpec> specs = config.specs;
  if (config.strategy == Strategy::kAtc && specs.empty()) {
    specs.assign(n, compression::CompressionSpec::identity(dim));
  }
  check_specs(config.problem, specs);
  if (config.reallocation && config.strategy == Strategy::kAtc) {
    throw InvalidArgument("reallocation applies to the compressed strategy");
  }
  if (config.reallocation &&
      (config.reallocation->t_opt < 0 ||
       config.reallocation->t_opt > config.horizon)) {
    throw InvalidArgument("t_opt must lie in [0, horizon]");
  }

  Rng rng(config.seed, static_cast<std::uint64_t>(run_index));
  NetworkState state = init(config.problem, config.matrix, config.q0);

  const double forgetting =
      config.reallocation ? config.reallocation->forgetting : 0.05;
  std::vector<DistortionEstimate> estimates(
      n, DistortionEstimate{0.0, forgetting});

  Trajectory trajectory;
  trajectory.agent_sq_error.resize(config.horizon + 1, n);
  trajectory.network_mse.resize(config.horizon + 1);
  trajectory.bits_cumulative.resize(config.horizon + 1);

  auto record = [&](int iter) {
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      const double err =
          (state.agents[k].w - config.problem.w_true).squaredNorm();
      trajectory.agent_sq_error(iter, k) = err;
      total += err;
    }
    trajectory.network_mse[iter] = total / n;
  };

  auto bits_per_iteration = [&]() {
    std::int64_t total = 0;
    for (const compression::CompressionSpec& spec : specs) {
      total += compression::bit_cost(spec);
    }
    return static_cast<double>(total);
  };

  record(0);
  trajectory.bits_cumulative[0] = 0.0;
  if (observer) observer(0, state);

  for (int iter = 1; iter <= config.horizon; ++iter) {
    StepInfo info;
    if (config.strategy == Strategy::kAtc) {
      info = atc_step(state, config.problem, config.matrix, rng);
    } else {
      info = actc_step(state, config.problem, config.matrix, config.zeta,
                       specs, rng);
    }
    for (int k = 0; k < n; ++k) {
      estimates[k].value = (1.0 - estimates[k].forgetting) * estimates[k].value +
                           estimates[k].forgetting * info.innovation_sq[k];
    }
    record(iter);
    trajectory.bits_cumulative[iter] =
        trajectory.bits_cumulative[iter - 1] + bits_per_iteration();
    if (observer) observer(iter, state);

    if (config.reallocation && iter == config.reallocation->t_opt) {
      const topology::PerronVector estimate =
          topology::consensus_perron_estimate(config.matrix);
      Eigen::VectorXd d_hat(n);
      for (int k = 0; k < n; ++k) {
        double value = estimates[k].value;
        if (config.reallocation->rescale) {
          const double mu = config.problem.agents[k].step_size;
          value /= 4.0 * mu * mu;
        }
        d_hat[k] = value;
      }
      specs = config.reallocation->planner(estimate.pi, d_hat);
      check_specs(config.problem, specs);
    }
  }

  trajectory.distortion_estimates.resize(n);
  trajectory.distortion_estimates_rescaled.resize(n);
  trajectory.final_resources.resize(n);
  for (int k = 0; k < n; ++k) {
    trajectory.distortion_estimates[k] = estimates[k].value;
    const double mu = config.problem.agents[k].step_size;
    trajectory.distortion_estimates_rescaled[k] =
        mu > 0.0 ? estimates[k].value / (4.0 * mu * mu) : 0.0;
    trajectory.final_resources[k] = resource_of(specs[k]);
  }
  return trajectory;
}

Trajectory run_monte_carlo(const RunConfig& config, int threads) {
  if (config.runs < 1) throw InvalidArgument("need at least one run");
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
  }
  threads = std::min(threads, config.runs);

  std::vector<Trajectory> results(config.runs);
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int index = next.fetch_add(1);
      if (index >= config.runs) break;
      results[index] = run(config, index);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // Fixed-order accumulation keeps the average byte-identical no matter
  // how the runs were scheduled above.
  Trajectory average = std::move(results[0]);
  for (int r = 1; r < config.runs; ++r) {
    average.agent_sq_error += results[r].agent_sq_error;
    average.network_mse += results[r].network_mse;
    average.bits_cumulative += results[r].bits_cumulative;
    average.distortion_estimates += results[r].distortion_estimates;
    average.distortion_estimates_rescaled +=
        results[r].distortion_estimates_rescaled;
    average.final_resources += results[r].final_resources;
  }
  const double scale = 1.0 / config.runs;
  average.agent_sq_error *= scale;
  average.network_mse *= scale;
  average.bits_cumulative *= scale;
  average.distortion_estimates *= scale;
  average.distortion_estimates_rescaled *= scale;
  average.final_resources *= scale;
  return average;
}

}  // namespace actc::diffusion

#include "actc/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <utility>

#include "actc/errors.hpp"

namespace actc::model {

namespace {

constexpr double kSymmetryTol = 1e-12;  // relative, on max |r - r'|

}  // namespace

AgentModel make_agent(const Eigen::MatrixXd& r_u, double sigma2_v,
                      double step_size) {
  if (r_u.rows() != r_u.cols() || r_u.rows() < 1) {
    throw DimensionMismatch("agent covariance must be square and non-empty");
  }
  if (!(sigma2_v > 0.0)) {
    throw InvalidArgument("noise variance must be positive");
  }
  if (!(step_size >= 0.0)) {
    throw InvalidArgument("step size must be non-negative");
  }
  const double scale = std::max(1.0, r_u.cwiseAbs().maxCoeff());
  if ((r_u - r_u.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw InvalidArgument("agent covariance must be symmetric");
  }

  // Eigendecomposition both validates positive semidefiniteness and yields
  // the symmetric square root used to sample correlated regressors.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r_u);
  Eigen::VectorXd evals = eig.eigenvalues();
  const double clamp = -1e-12 * scale;  // tolerated round-off below zero
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals[i] < clamp) {
      throw InvalidArgument("agent covariance must be positive semidefinite "
                            "(eigenvalue " + std::to_string(evals[i]) + ")");
    }
    if (evals[i] < 0.0) evals[i] = 0.0;
  }

  AgentModel agent;
  agent.r_u = r_u;
  agent.r_u_sqrt = eig.eigenvectors() *
                   evals.cwiseSqrt().asDiagonal() *
                   eig.eigenvectors().transpose();
  agent.sigma2_v = sigma2_v;
  agent.step_size = step_size;
  return agent;
}

Eigen::MatrixXd scaled_identity(int dim, double scale) {
  if (dim < 1) throw DimensionMismatch("dimension must be positive");
  return scale * Eigen::MatrixXd::Identity(dim, dim);
}

Eigen::MatrixXd diagonal_covariance(const Eigen::VectorXd& variances) {
  if (variances.size() < 1) {
    throw DimensionMismatch("dimension must be positive");
  }
  return variances.asDiagonal();
}

RegressionProblem make_problem(Eigen::VectorXd w_true,
                               std::vector<AgentModel> agents) {
  if (agents.empty()) throw InvalidArgument("need at least one agent");
  const Eigen::Index dim = w_true.size();
  if (dim < 1) throw DimensionMismatch("dimension must be positive");
  for (const AgentModel& agent : agents) {
    if (agent.r_u.rows() != dim) {
      throw DimensionMismatch("agent covariance dimension differs from "
                              "minimizer dimension");
    }
  }
  RegressionProblem problem;
  problem.w_true = std::move(w_true);
  problem.agents = std::move(agents);
  return problem;
}

ScaledSteps scaled_steps(const RegressionProblem& problem) {
  const int n = problem.num_agents();
  double mu_max = 0.0;
  for (const AgentModel& agent : problem.agents) {
    mu_max = std::max(mu_max, agent.step_size);
  }
  if (!(mu_max > 0.0)) {
    throw InvalidArgument("scaled steps need at least one positive step size");
  }
  ScaledSteps steps;
  steps.mu_max = mu_max;
  steps.alphas.resize(n);
  for (int k = 0; k < n; ++k) {
    steps.alphas[k] = problem.agents[k].step_size / mu_max;
  }
  return steps;
}

Observation sample_observation(const RegressionProblem& problem, int agent,
                               Rng& rng) {
  const AgentModel& a = problem.agents.at(agent);
  const int dim = problem.dim();
  Eigen::VectorXd z(dim);
  for (int m = 0; m < dim; ++m) z[m] = rng.normal();
  Observation obs;
  obs.regressor = a.r_u_sqrt * z;
  obs.response = obs.regressor.dot(problem.w_true) +
                 std::sqrt(a.sigma2_v) * rng.normal();
  return obs;
}

Eigen::VectorXd stochastic_gradient(const Eigen::VectorXd& regressor,
                                    double response,
                                    const Eigen::VectorXd& w) {
  if (regressor.size() != w.size()) {
    throw DimensionMismatch("regressor and iterate dimensions differ");
  }
  return 2.0 * (regressor.dot(w) - response) * regressor;
}

Eigen::VectorXd true_gradient(const RegressionProblem& problem, int agent,
                              const Eigen::VectorXd& w) {
  const AgentModel& a = problem.agents.at(agent);
  if (w.size() != problem.w_true.size()) {
    throw DimensionMismatch("iterate dimension differs from problem");
  }
  return 2.0 * (a.r_u * (w - problem.w_true));
}

Eigen::MatrixXd gradient_noise_covariance_at_optimum(
    const RegressionProblem& problem, int agent,
    const Eigen::VectorXd& alphas) {
  if (alphas.size() != problem.num_agents()) {
    throw DimensionMismatch("one alpha per agent required");
  }
  const AgentModel& a = problem.agents.at(agent);
  const double alpha = alphas[agent];
  return 4.0 * alpha * alpha * a.sigma2_v * a.r_u;
}

double distortion_coefficient(const RegressionProblem& problem, int agent,
                              const Eigen::VectorXd& alphas) {
  if (alphas.size() != problem.num_agents()) {
    throw DimensionMismatch("one alpha per agent required");
  }
  const AgentModel& a = problem.agents.at(agent);
  const double alpha = alphas[agent];
  return alpha * alpha * a.sigma2_v * a.r_u.trace();
}

double strong_convexity_constant(const RegressionProblem& problem,
                                 const Eigen::VectorXd& perron,
                                 const Eigen::VectorXd& alphas) {
  const int n = problem.num_agents();
  if (perron.size() != n || alphas.size() != n) {
    throw DimensionMismatch("perron/alpha lengths must match agent count");
  }
  const int dim = problem.dim();
  Eigen::MatrixXd aggregate = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    aggregate += 2.0 * alphas[k] * perron[k] * problem.agents[k].r_u;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(aggregate);
  const double nu = eig.eigenvalues().minCoeff();
  if (nu <= 1e-12) {
    throw NotStronglyConvex("network aggregate of regressor covariances is "
                            "not positive definite");
  }
  return nu;
}

}  // namespace actc::model

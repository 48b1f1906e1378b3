#pragma once

#include <Eigen/Dense>
#include <vector>

#include "actc/rng.hpp"

namespace actc::model {

// Local data model of one agent observing the common linear regression
//   d = u' w_true + v,   u ~ N(0, r_u),   v ~ N(0, sigma2_v),
// and adapting with step size step_size.
struct AgentModel {
  Eigen::MatrixXd r_u;       // regressor covariance, symmetric PSD, M x M
  Eigen::MatrixXd r_u_sqrt;  // symmetric square root of r_u, used for sampling
  double sigma2_v = 0.0;     // observation-noise variance, > 0
  double step_size = 0.0;    // adaptation step size mu_k, >= 0
};

// Validates inputs and precomputes the sampling factor. Asymmetric or
// indefinite covariances raise InvalidArgument; eigenvalues in
// [-1e-12 * ||r_u||, 0) are clamped to zero (round-off tolerance).
AgentModel make_agent(const Eigen::MatrixXd& r_u, double sigma2_v,
                      double step_size);

// Convenience covariance builders for the input forms accepted by configs.
Eigen::MatrixXd scaled_identity(int dim, double scale);
Eigen::MatrixXd diagonal_covariance(const Eigen::VectorXd& variances);

// Network-wide problem instance: the common minimizer plus one model per
// agent, all sharing the same dimension.
struct RegressionProblem {
  Eigen::VectorXd w_true;
  std::vector<AgentModel> agents;

  int dim() const { return static_cast<int>(w_true.size()); }
  int num_agents() const { return static_cast<int>(agents.size()); }
};

RegressionProblem make_problem(Eigen::VectorXd w_true,
                               std::vector<AgentModel> agents);

// Step-size normalization: mu_max = max_k step_size, alphas_k =
// step_size_k / mu_max, so max(alphas) == 1 exactly.
struct ScaledSteps {
  double mu_max = 0.0;
  Eigen::VectorXd alphas;
};

ScaledSteps scaled_steps(const RegressionProblem& problem);

struct Observation {
  Eigen::VectorXd regressor;  // u
  double response = 0.0;      // d
};

// Draws one (u, d) pair for the given agent.
Observation sample_observation(const RegressionProblem& problem, int agent,
                               Rng& rng);

// Instantaneous LMS gradient estimate: 2 u (u' w - d).
Eigen::VectorXd stochastic_gradient(const Eigen::VectorXd& regressor,
                                    double response,
                                    const Eigen::VectorXd& w);

// Exact gradient of E (d - u' w)^2 at w: 2 r_u (w - w_true).
Eigen::VectorXd true_gradient(const RegressionProblem& problem, int agent,
                              const Eigen::VectorXd& w);

// Covariance of the scaled gradient noise alpha_k * (true - stochastic
// gradient) evaluated at w_true: 4 alpha_k^2 sigma2_v r_u.
Eigen::MatrixXd gradient_noise_covariance_at_optimum(
    const RegressionProblem& problem, int agent,
    const Eigen::VectorXd& alphas);

// Scalar distortion coefficient d_k = alpha_k^2 sigma2_v tr(r_u), i.e. a
// quarter of the trace of the covariance above. Drives resource allocation.
double distortion_coefficient(const RegressionProblem& problem, int agent,
                              const Eigen::VectorXd& alphas);

// nu = lambda_min( 2 sum_k alpha_k pi_k r_u_k ). Throws NotStronglyConvex
// when the aggregate is not positive definite (nu <= 1e-12).
double strong_convexity_constant(const RegressionProblem& problem,
                                 const Eigen::VectorXd& perron,
                                 const Eigen::VectorXd& alphas);

}  // namespace actc::model

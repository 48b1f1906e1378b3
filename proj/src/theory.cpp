#include "actc/theory.hpp"

#include <Eigen/Eigenvalues>
#include <limits>
#include <string>

#include "actc/errors.hpp"

namespace actc::theory {

namespace {

void check_lengths(const model::RegressionProblem& problem,
                   const Eigen::VectorXd& perron,
                   const Eigen::VectorXd& alphas) {
  if (perron.size() != problem.num_agents() ||
      alphas.size() != problem.num_agents()) {
    throw DimensionMismatch("perron/alpha lengths must match agent count");
  }
}

}  // namespace

double delta_s(const model::RegressionProblem& problem,
               const Eigen::VectorXd& perron, const Eigen::VectorXd& alphas,
               double zeta) {
  check_lengths(problem, perron, alphas);
  if (!(zeta > 0.0)) throw InvalidArgument("zeta must be positive");

  const int dim = problem.dim();
  Eigen::MatrixXd aggregate = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < problem.num_agents(); ++k) {
    const double weight = alphas[k] * perron[k];
    aggregate += weight * problem.agents[k].r_u;
    noise += weight * weight * problem.agents[k].sigma2_v *
             problem.agents[k].r_u;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(aggregate);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) {
    throw SingularAggregate(
        "aggregate regressor covariance is numerically singular "
        "(condition " +
        std::to_string(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()) +
        ")");
  }
  return zeta * aggregate.ldlt().solve(noise).trace();
}

double delta_omega(const model::RegressionProblem& problem,
                   const Eigen::VectorXd& perron,
                   const Eigen::VectorXd& alphas, double zeta,
                   const Eigen::VectorXd& omegas, double nu, double c) {
  check_lengths(problem, perron, alphas);
  if (omegas.size() != problem.num_agents()) {
    throw DimensionMismatch("one omega per agent required");
  }
  if (!(zeta > 0.0)) throw InvalidArgument("zeta must be positive");
  if (!(nu > 0.0)) throw NotStronglyConvex("nu must be positive");
  if (c < 0.0) throw InvalidArgument("c must be non-negative");

  double weighted = 0.0;
  for (int k = 0; k < problem.num_agents(); ++k) {
    const double pa = alphas[k] * perron[k];
    weighted += pa * pa * problem.agents[k].sigma2_v * omegas[k] *
                problem.agents[k].r_u.trace();
  }
  return (2.0 * zeta / nu) * weighted + network_error_term(c, zeta, nu);
}

double network_error_term(double c, double zeta, double nu) {
  if (!(nu > 0.0)) throw NotStronglyConvex("nu must be positive");
  return c * zeta * zeta / (2.0 * nu);
}

TheoryBounds mse_bounds(double mu, double delta_s_value,
                        double delta_omega_value, double network_part) {
  if (!(mu > 0.0)) throw InvalidArgument("mu must be positive");
  if (delta_s_value < 0.0 || delta_omega_value < 0.0 || network_part < 0.0) {
    throw InvalidArgument("bound terms must be non-negative");
  }
  if (network_part > delta_omega_value) {
    throw InvalidArgument("network part cannot exceed delta_omega");
  }
  TheoryBounds bounds;
  bounds.delta_s = delta_s_value;
  bounds.delta_omega = delta_omega_value;
  bounds.lower = mu * delta_s_value;
  bounds.upper = mu * (delta_s_value + delta_omega_value);
  bounds.decomposition.uncompressed = mu * delta_s_value;
  bounds.decomposition.gradient_noise_compression =
      mu * (delta_omega_value - network_part);
  bounds.decomposition.network_error_compression = mu * network_part;
  return bounds;
}

std::int64_t bit_expense_quantized(std::int64_t horizon, int n, int dim,
                                   int norm_bits, std::int64_t total_bits) {
  if (horizon < 0 || n < 1 || dim < 1 || norm_bits < 1 || total_bits < 0) {
    throw InvalidArgument("bit expense arguments out of range");
  }
  return horizon * (static_cast<std::int64_t>(n) * norm_bits +
                    dim * total_bits +
                    static_cast<std::int64_t>(dim) * n);
}

std::int64_t bit_expense_dense(std::int64_t horizon, int n, int dim,
                               int norm_bits) {
  if (horizon < 0 || n < 1 || dim < 1 || norm_bits < 1) {
    throw InvalidArgument("bit expense arguments out of range");
  }
  return horizon * static_cast<std::int64_t>(n) * dim * norm_bits;
}

}  // namespace actc::theory

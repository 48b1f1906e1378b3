#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "actc/model.hpp"

namespace actc::theory {

// Split of the steady-state upper bound into its three sources.
struct Decomposition {
  double uncompressed = 0.0;                 // mu * delta_s
  double gradient_noise_compression = 0.0;   // mu * (delta_omega - c part)
  double network_error_compression = 0.0;    // mu * c zeta^2 / (2 nu)
};

struct TheoryBounds {
  double delta_s = 0.0;
  double delta_omega = 0.0;
  double lower = 0.0;  // mu * delta_s
  double upper = 0.0;  // mu * (delta_s + delta_omega)
  Decomposition decomposition;
};

// Steady-state error floor of the uncompressed (identity) strategy:
//   delta_s = zeta * tr[ (sum_k alpha_k pi_k R_k)^(-1)
//                        (sum_k alpha_k^2 pi_k^2 sigma2_k R_k) ].
// The aggregate is inverted through a factorization; a condition number
// above 1e12 (or a non-positive spectrum) raises SingularAggregate.
double delta_s(const model::RegressionProblem& problem,
               const Eigen::VectorXd& perron, const Eigen::VectorXd& alphas,
               double zeta);

// Compression penalty:
//   delta_omega = (2 zeta / nu) * sum_k alpha_k^2 pi_k^2 sigma2_k omega_k
//                 tr[R_k]  +  c zeta^2 / (2 nu),
// where omegas holds each agent's compressor variance parameter and nu is
// the network strong-convexity constant. The constant c bundles
// higher-order network terms; it defaults to 0 (reported bounds keep only
// the leading term).
double delta_omega(const model::RegressionProblem& problem,
                   const Eigen::VectorXd& perron,
                   const Eigen::VectorXd& alphas, double zeta,
                   const Eigen::VectorXd& omegas, double nu, double c = 0.0);

// The c-dependent part alone, for reporting the bound decomposition.
double network_error_term(double c, double zeta, double nu);

// Sandwich for the steady-state network MSE:
//   mu * delta_s <= MSE <= mu * (delta_s + delta_omega).
// network_part is the c zeta^2 / (2 nu) share of delta_omega (0 when c = 0)
// and only affects the reported decomposition.
TheoryBounds mse_bounds(double mu, double delta_s_value,
                        double delta_omega_value, double network_part = 0.0);

// Total transmitted bits over horizon iterations for a network of n agents
// compressing dim-dimensional vectors.
// Differential quantization with a shared budget of total_bits levels bits
// per iteration: horizon * (n * norm_bits + dim * total_bits + dim * n).
std::int64_t bit_expense_quantized(std::int64_t horizon, int n, int dim,
                                   int norm_bits, std::int64_t total_bits);
// Dense full-precision exchange: horizon * n * dim * norm_bits.
std::int64_t bit_expense_dense(std::int64_t horizon, int n, int dim,
                               int norm_bits);

}  // namespace actc::theory

#pragma once

#include <Eigen/Dense>

#include "actc/errors.hpp"

namespace actc::allocation {

// Variance profile omega(x) as a function of the per-agent communication
// resource x (bits for quantizers, kept components for sparsifiers).
enum class Family {
  kQuantizerHighRes,  // dim / (2^x - 1)^2
  kQuantizerPow2,     // dim * 2^(-2x), the high-rate simplification
  kSparsifier         // dim / x - 1
};

// min_x  sum_k perron_k^2 distortion_k omega(x_k)
// s.t.   sum_k x_k <= budget,   x_min <= x_k <= x_max.
struct AllocationProblem {
  int n = 0;
  double budget = 0.0;  // X
  double x_min = 0.0;
  double x_max = 0.0;
  Eigen::VectorXd perron;       // entrywise positive
  Eigen::VectorXd distortions;  // d_k, entrywise positive
  int dim = 0;                  // M
  Family family = Family::kQuantizerHighRes;
};

void check(const AllocationProblem& problem);  // throws on malformed input

double objective(const AllocationProblem& problem, const Eigen::VectorXd& x);

struct AllocationSolution {
  Eigen::VectorXd x_real;        // continuous optimizer
  Eigen::VectorXi x_int;         // floor of x_real clamped into the box
  double lambda0 = 0.0;          // budget multiplier
  Eigen::VectorXd lambda_lower;  // box multipliers at x_min
  Eigen::VectorXd lambda_upper;  // box multipliers at x_max
  double objective_real = 0.0;
  double objective_int = 0.0;
};

// Exact continuous solution by waterfilling on the budget multiplier:
// each agent's stationarity condition is solved (closed-form for the
// sparsifier and power-of-two families, monotone bisection for the exact
// quantizer profile), clipped into the box, and the common multiplier is
// bisected in log space until the budget is met. When n * x_max <= budget
// every agent simply receives x_max and lambda0 = 0. Throws Infeasible for
// budget < n * x_min.
AllocationSolution solve_kkt(const AllocationProblem& problem);

// High-rate closed form for quantizers with inactive boxes:
//   x_k = budget/n + log2(perron_k / gm(perron)) +
//         0.5 log2(distortion_k / gm(distortion)),
// with gm the geometric mean. Sums to the budget by construction; equals
// the kQuantizerPow2 waterfilling solution when no box binds.
Eigen::VectorXd closed_form_quantizer(const AllocationProblem& problem);

// Integer projection: floor, then clamp into [ceil(x_min), floor(x_max)].
// With repair enabled, leftover whole units of budget are handed out
// greedily to the agent with the largest objective improvement.
Eigen::VectorXi round_to_integer(const AllocationProblem& problem,
                                 const Eigen::VectorXd& x_real,
                                 bool repair = false);

// Exhaustive integer search (oracle for tests). Guards: n <= 6 and at most
// 1e7 grid points, else TooLarge. Ties break lexicographically.
Eigen::VectorXi brute_force(const AllocationProblem& problem);

struct KktReport {
  double stationarity = 0.0;    // max |lambda0 + up_k - low_k - f_k(x_k)|
  double primal = 0.0;          // max constraint violation
  double dual = 0.0;            // max negative multiplier magnitude
  double complementarity = 0.0; // max |multiplier * slack|
  bool ok(double tol = 1e-8) const {
    return stationarity <= tol && primal <= tol && dual <= tol &&
           complementarity <= tol;
  }
};

KktReport verify_kkt(const AllocationProblem& problem,
                     const AllocationSolution& solution);

}  // namespace actc::allocation

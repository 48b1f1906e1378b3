#include "actc/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace actc::allocation {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321215;

double omega_of(const AllocationProblem& problem, double x) {
  const double dim = static_cast<double>(problem.dim);
  switch (problem.family) {
    case Family::kQuantizerHighRes: {
      const double levels = std::exp2(x) - 1.0;
      return dim / (levels * levels);
    }
    case Family::kQuantizerPow2:
      return dim * std::exp2(-2.0 * x);
    case Family::kSparsifier:
      return dim / x - 1.0;
  }
  throw InvalidArgument("unknown allocation family");
}

// Magnitude of the objective derivative for agent k,
//   f_k(x) = -perron_k^2 d_k * d omega / dx  (positive, strictly
// decreasing on x > 0 for every family). Interior stationarity reads
// f_k(x_k) = lambda0.
double marginal(const AllocationProblem& problem, int k, double x) {
  const double weight =
      problem.perron[k] * problem.perron[k] * problem.distortions[k];
  const double dim = static_cast<double>(problem.dim);
  switch (problem.family) {
    case Family::kQuantizerHighRes: {
      const double p = std::exp2(x);
      const double levels = p - 1.0;
      return weight * dim * kLn2 * 2.0 * p / (levels * levels * levels);
    }
    case Family::kQuantizerPow2:
      return weight * dim * 2.0 * kLn2 * std::exp2(-2.0 * x);
    case Family::kSparsifier:
      return weight * dim / (x * x);
  }
  throw InvalidArgument("unknown allocation family");
}

// Solves f_k(x) = lambda0 on [x_min, x_max], clipping to the nearer box
// edge when no interior root exists.
double clipped_root(const AllocationProblem& problem, int k, double lambda0) {
  if (marginal(problem, k, problem.x_min) <= lambda0) return problem.x_min;
  if (marginal(problem, k, problem.x_max) >= lambda0) return problem.x_max;
  const double weight =
      problem.perron[k] * problem.perron[k] * problem.distortions[k];
  const double dim = static_cast<double>(problem.dim);
  switch (problem.family) {
    case Family::kQuantizerPow2:
      return -0.5 * std::log2(lambda0 / (weight * dim * 2.0 * kLn2));
    case Family::kSparsifier:
      return std::sqrt(weight * dim / lambda0);
    case Family::kQuantizerHighRes: {
      double lo = problem.x_min;
      double hi = problem.x_max;
      for (int iter = 0; iter < 200 && lo < hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval exhausted
        if (marginal(problem, k, mid) > lambda0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
  }
  throw InvalidArgument("unknown allocation family");
}

double budget_used(const AllocationProblem& problem, double lambda0) {
  double total = 0.0;
  for (int k = 0; k < problem.n; ++k) {
    total += clipped_root(problem, k, lambda0);
  }
  return total;
}

}  // namespace

void check(const AllocationProblem& problem) {
  if (problem.n < 1) throw InvalidArgument("need at least one agent");
  if (problem.dim < 1) throw InvalidArgument("dimension must be positive");
  if (problem.perron.size() != problem.n ||
      problem.distortions.size() != problem.n) {
    throw DimensionMismatch("perron/distortion lengths must match n");
  }
  if ((problem.perron.array() <= 0.0).any()) {
    throw InvalidArgument("perron weights must be positive");
  }
  if ((problem.distortions.array() <= 0.0).any()) {
    throw InvalidArgument("distortion coefficients must be positive");
  }
  if (!(problem.x_min > 0.0) || !(problem.x_max >= problem.x_min)) {
    throw InvalidArgument("box must satisfy 0 < x_min <= x_max");
  }
  if (problem.family == Family::kSparsifier &&
      problem.x_max > problem.dim + 1e-12) {
    throw InvalidArgument("sparsifier resources cannot exceed the dimension");
  }
  if (problem.budget < problem.n * problem.x_min - 1e-12) {
    throw Infeasible("budget below n * x_min");
  }
}

double objective(const AllocationProblem& problem, const Eigen::VectorXd& x) {
  if (x.size() != problem.n) {
    throw DimensionMismatch("allocation length must match n");
  }
  double total = 0.0;
  for (int k = 0; k < problem.n; ++k) {
    total += problem.perron[k] * problem.perron[k] * problem.distortions[k] *
             omega_of(problem, x[k]);
  }
  return total;
}

AllocationSolution solve_kkt(const AllocationProblem& problem) {
  check(problem);
  const int n = problem.n;
  AllocationSolution solution;
  solution.x_real.resize(n);
  solution.lambda_lower = Eigen::VectorXd::Zero(n);
  solution.lambda_upper = Eigen::VectorXd::Zero(n);

  if (n * problem.x_max <= problem.budget) {
    // Budget slack: the objective decreases in every coordinate, so each
    // agent saturates at x_max and the budget constraint is inactive.
    solution.x_real.setConstant(problem.x_max);
    solution.lambda0 = 0.0;
    for (int k = 0; k < n; ++k) {
      solution.lambda_upper[k] = marginal(problem, k, problem.x_max);
    }
  } else {
    // Waterfilling: budget_used(lambda0) is continuous and non-increasing,
    // equal to n * x_max at the lower bracket and n * x_min at the upper
    // bracket. Bisect log(lambda0) so precision is relative.
    double lambda_lo = std::numeric_limits<double>::infinity();
    double lambda_hi = 0.0;
    for (int k = 0; k < n; ++k) {
      lambda_lo = std::min(lambda_lo, marginal(problem, k, problem.x_max));
      lambda_hi = std::max(lambda_hi, marginal(problem, k, problem.x_min));
    }
    double t_lo = std::log(lambda_lo);
    double t_hi = std::log(lambda_hi);
    for (int iter = 0; iter < 200 && t_lo < t_hi; ++iter) {
      const double t_mid = 0.5 * (t_lo + t_hi);
      if (t_mid <= t_lo || t_mid >= t_hi) break;
      if (budget_used(problem, std::exp(t_mid)) > problem.budget) {
        t_lo = t_mid;
      } else {
        t_hi = t_mid;
      }
    }
    // The hi side is the feasible one (budget_used <= budget).
    solution.lambda0 = std::exp(t_hi);
    for (int k = 0; k < n; ++k) {
      solution.x_real[k] = clipped_root(problem, k, solution.lambda0);
      const double f_min = marginal(problem, k, problem.x_min);
      const double f_max = marginal(problem, k, problem.x_max);
      if (solution.x_real[k] <= problem.x_min && solution.lambda0 > f_min) {
        solution.lambda_lower[k] = solution.lambda0 - f_min;
      }
      if (solution.x_real[k] >= problem.x_max && f_max > solution.lambda0) {
        solution.lambda_upper[k] = f_max - solution.lambda0;
      }
    }
  }

  solution.x_int = round_to_integer(problem, solution.x_real, false);
  solution.objective_real = objective(problem, solution.x_real);
  solution.objective_int =
      objective(problem, solution.x_int.cast<double>());
  return solution;
}

Eigen::VectorXd closed_form_quantizer(const AllocationProblem& problem) {
  check(problem);
  const int n = problem.n;
  double log_perron = 0.0;
  double log_distortion = 0.0;
  for (int k = 0; k < n; ++k) {
    log_perron += std::log2(problem.perron[k]);
    log_distortion += std::log2(problem.distortions[k]);
  }
  log_perron /= n;      // log2 of the geometric mean
  log_distortion /= n;
  Eigen::VectorXd x(n);
  for (int k = 0; k < n; ++k) {
    x[k] = problem.budget / n + (std::log2(problem.perron[k]) - log_perron) +
           0.5 * (std::log2(problem.distortions[k]) - log_distortion);
  }
  return x;
}

Eigen::VectorXi round_to_integer(const AllocationProblem& problem,
                                 const Eigen::VectorXd& x_real, bool repair) {
  check(problem);
  if (x_real.size() != problem.n) {
    throw DimensionMismatch("allocation length must match n");
  }
  const int lo = static_cast<int>(std::ceil(problem.x_min - 1e-12));
  const int hi = static_cast<int>(std::floor(problem.x_max + 1e-12));
  if (lo > hi) throw Infeasible("box contains no integer point");
  Eigen::VectorXi x(problem.n);
  for (int k = 0; k < problem.n; ++k) {
    x[k] = std::clamp(static_cast<int>(std::floor(x_real[k] + 1e-12)), lo, hi);
  }
  if (repair) {
    // Hand out whole leftover units one at a time to the agent whose
    // next unit removes the most distortion.
    auto gain = [&](int k) {
      if (x[k] >= hi) return -1.0;
      const double weight =
          problem.perron[k] * problem.perron[k] * problem.distortions[k];
      return weight * (omega_of(problem, x[k]) - omega_of(problem, x[k] + 1));
    };
    while (static_cast<double>(x.sum()) + 1.0 <= problem.budget + 1e-12) {
      int best = -1;
      double best_gain = 0.0;
      for (int k = 0; k < problem.n; ++k) {
        const double g = gain(k);
        if (g > best_gain) {
          best_gain = g;
          best = k;
        }
      }
      if (best < 0) break;  // every agent is at the box ceiling
      x[best] += 1;
    }
  }
  return x;
}

Eigen::VectorXi brute_force(const AllocationProblem& problem) {
  check(problem);
  if (problem.n > 6) throw TooLarge("brute force capped at 6 agents");
  const int lo = static_cast<int>(std::ceil(problem.x_min - 1e-12));
  const int hi = static_cast<int>(std::floor(problem.x_max + 1e-12));
  if (lo > hi) throw Infeasible("box contains no integer point");
  if (static_cast<double>(problem.n) * lo > problem.budget + 1e-12) {
    throw Infeasible("budget below n * ceil(x_min)");
  }
  const double width = hi - lo + 1;
  if (std::pow(width, problem.n) > 1e7) {
    throw TooLarge("integer grid exceeds 1e7 points");
  }

  Eigen::VectorXi x = Eigen::VectorXi::Constant(problem.n, lo);
  Eigen::VectorXi best;
  double best_value = std::numeric_limits<double>::infinity();
  while (true) {
    if (static_cast<double>(x.sum()) <= problem.budget + 1e-12) {
      const double value = objective(problem, x.cast<double>());
      if (value < best_value) {  // strict: ties keep the earlier (lex) point
        best_value = value;
        best = x;
      }
    }
    // Odometer increment in lexicographic order.
    int pos = problem.n - 1;
    while (pos >= 0 && x[pos] == hi) {
      x[pos] = lo;
      --pos;
    }
    if (pos < 0) break;
    x[pos] += 1;
  }
  if (best.size() == 0) throw Infeasible("no feasible integer allocation");
  return best;
}

KktReport verify_kkt(const AllocationProblem& problem,
                     const AllocationSolution& solution) {
  check(problem);
  const int n = problem.n;
  if (solution.x_real.size() != n || solution.lambda_lower.size() != n ||
      solution.lambda_upper.size() != n) {
    throw DimensionMismatch("solution length must match n");
  }
  KktReport report;
  const double used = solution.x_real.sum();
  report.primal = std::max(0.0, used - problem.budget);
  report.dual = std::max(0.0, -solution.lambda0);
  report.complementarity =
      std::abs(solution.lambda0 * (used - problem.budget));
  for (int k = 0; k < n; ++k) {
    const double x = solution.x_real[k];
    report.primal = std::max({report.primal, problem.x_min - x,
                              x - problem.x_max});
    report.dual = std::max({report.dual, -solution.lambda_lower[k],
                            -solution.lambda_upper[k]});
    report.stationarity =
        std::max(report.stationarity,
                 std::abs(solution.lambda0 + solution.lambda_upper[k] -
                          solution.lambda_lower[k] - marginal(problem, k, x)));
    report.complementarity =
        std::max({report.complementarity,
                  std::abs(solution.lambda_lower[k] * (problem.x_min - x)),
                  std::abs(solution.lambda_upper[k] * (x - problem.x_max))});
  }
  return report;
}

}  // namespace actc::allocation

#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "actc/rng.hpp"

namespace actc::compression {

enum class Family {
  kIdentity,             // lossless passthrough
  kRandomizedQuantizer,  // norm + sign + randomized uniform level per entry
  kRandomizedSparsifier  // uniform random subset, rescaled by dim/kept
};

// Description of one agent's compression operator for dim-dimensional
// vectors. Use the factories below; fields are only meaningful for the
// corresponding family.
struct CompressionSpec {
  Family family = Family::kIdentity;
  int dim = 0;
  int levels_bits = 0;       // quantizer: r, encodes 2^r - 1 positive levels
  int kept_components = 0;   // sparsifier: S entries survive
  int norm_bits = 32;        // h, float budget for norms / dense entries

  static CompressionSpec identity(int dim, int norm_bits = 32);
  static CompressionSpec quantizer(int dim, int levels_bits,
                                   int norm_bits = 32);
  static CompressionSpec sparsifier(int dim, int kept_components,
                                    int norm_bits = 32);
};

// Variance parameter of the operator: E||Q(x) - x||^2 <= omega ||x||^2 with
// E[Q(x)] = x. Identity: 0. Quantizer with L = 2^r - 1 levels:
// min(dim / L^2, sqrt(dim) / L). Sparsifier: dim / kept - 1.
double omega(const CompressionSpec& spec);

// High-resolution quantizer approximation dim / (2^x - 1)^2 for a real
// (fractional) bit budget x > 0. Used by the resource allocator.
double high_resolution_omega(int dim, double x);

// Bits broadcast per compressed vector. Quantizer: norm_bits + dim *
// (levels_bits + 1). Sparsifier: kept * (norm_bits + ceil(log2 dim)).
// Identity: dim * norm_bits (dense full-precision payload).
std::int64_t bit_cost(const CompressionSpec& spec);

// One randomized application of the operator. Unbiased for every family;
// deterministic given (spec, x, rng state).
Eigen::VectorXd compress(const CompressionSpec& spec, const Eigen::VectorXd& x,
                         Rng& rng);

}  // namespace actc::compression

#include "actc/compression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "actc/errors.hpp"

namespace actc::compression {

namespace {

void check_dim(const CompressionSpec& spec, const Eigen::VectorXd& x) {
  if (x.size() != spec.dim) {
    throw DimensionMismatch("vector length does not match compressor spec");
  }
}

int ceil_log2(int n) {
  int bits = 0;
  int capacity = 1;
  while (capacity < n) {
    capacity *= 2;
    ++bits;
  }
  return bits;
}

}  // namespace

CompressionSpec CompressionSpec::identity(int dim, int norm_bits) {
  if (dim < 1) throw InvalidArgument("compressor dimension must be positive");
  if (norm_bits < 1) throw InvalidArgument("norm bit budget must be positive");
  CompressionSpec spec;
  spec.family = Family::kIdentity;
  spec.dim = dim;
  spec.norm_bits = norm_bits;
  return spec;
}

CompressionSpec CompressionSpec::quantizer(int dim, int levels_bits,
                                           int norm_bits) {
  if (dim < 1) throw InvalidArgument("compressor dimension must be positive");
  if (levels_bits < 1 || levels_bits > 62) {
    throw InvalidArgument("quantizer bit budget must be in [1, 62]");
  }
  if (norm_bits < 1) throw InvalidArgument("norm bit budget must be positive");
  CompressionSpec spec;
  spec.family = Family::kRandomizedQuantizer;
  spec.dim = dim;
  spec.levels_bits = levels_bits;
  spec.norm_bits = norm_bits;
  return spec;
}

CompressionSpec CompressionSpec::sparsifier(int dim, int kept_components,
                                            int norm_bits) {
  if (dim < 1) throw InvalidArgument("compressor dimension must be positive");
  if (kept_components < 1 || kept_components > dim) {
    throw InvalidArgument("kept component count must be in [1, dim]");
  }
  if (norm_bits < 1) throw InvalidArgument("norm bit budget must be positive");
  CompressionSpec spec;
  spec.family = Family::kRandomizedSparsifier;
  spec.dim = dim;
  spec.kept_components = kept_components;
  spec.norm_bits = norm_bits;
  return spec;
}

double omega(const CompressionSpec& spec) {
  switch (spec.family) {
    case Family::kIdentity:
      return 0.0;
    case Family::kRandomizedQuantizer: {
      const double levels =
          std::ldexp(1.0, spec.levels_bits) - 1.0;  // 2^r - 1
      const double dim = static_cast<double>(spec.dim);
      return std::min(dim / (levels * levels), std::sqrt(dim) / levels);
    }
    case Family::kRandomizedSparsifier:
      return static_cast<double>(spec.dim) / spec.kept_components - 1.0;
  }
  throw InvalidArgument("unknown compression family");
}

double high_resolution_omega(int dim, double x) {
  if (dim < 1) throw InvalidArgument("dimension must be positive");
  if (!(x > 0.0)) throw InvalidArgument("bit budget must be positive");
  const double levels = std::exp2(x) - 1.0;
  return static_cast<double>(dim) / (levels * levels);
}

std::int64_t bit_cost(const CompressionSpec& spec) {
  const std::int64_t dim = spec.dim;
  const std::int64_t h = spec.norm_bits;
  switch (spec.family) {
    case Family::kIdentity:
      return dim * h;
    case Family::kRandomizedQuantizer:
      return h + dim * (static_cast<std::int64_t>(spec.levels_bits) + 1);
    case Family::kRandomizedSparsifier:
      return static_cast<std::int64_t>(spec.kept_components) *
             (h + ceil_log2(spec.dim));
  }
  throw InvalidArgument("unknown compression family");
}

Eigen::VectorXd compress(const CompressionSpec& spec, const Eigen::VectorXd& x,
                         Rng& rng) {
  check_dim(spec, x);
  switch (spec.family) {
    case Family::kIdentity:
      return x;

    case Family::kRandomizedQuantizer: {
      const double norm = x.norm();
      if (norm == 0.0) return Eigen::VectorXd::Zero(spec.dim);
      const double levels = std::ldexp(1.0, spec.levels_bits) - 1.0;
      Eigen::VectorXd out(spec.dim);
      for (int m = 0; m < spec.dim; ++m) {
        const double magnitude = std::abs(x[m]) / norm;  // in [0, 1]
        double level = std::floor(magnitude * levels);
        double up_probability = magnitude * levels - level;
        if (level >= levels) {  // magnitude == 1 (single-entry vectors)
          level = levels;
          up_probability = 0.0;
        }
        if (rng.uniform() < up_probability) level += 1.0;
        const double sign = x[m] < 0.0 ? -1.0 : 1.0;  // sign(0) := +1
        out[m] = norm * sign * level / levels;
      }
      return out;
    }

    case Family::kRandomizedSparsifier: {
      const int kept = spec.kept_components;
      // Partial Fisher-Yates: the first `kept` slots end up holding a
      // uniform random subset without replacement.
      std::vector<int> index(spec.dim);
      std::iota(index.begin(), index.end(), 0);
      Eigen::VectorXd out = Eigen::VectorXd::Zero(spec.dim);
      const double scale =
          static_cast<double>(spec.dim) / static_cast<double>(kept);
      for (int i = 0; i < kept; ++i) {
        const int j =
            i + static_cast<int>(rng.uniform_int(spec.dim - i));
        std::swap(index[i], index[j]);
        out[index[i]] = scale * x[index[i]];
      }
      return out;
    }
  }
  throw InvalidArgument("unknown compression family");
}

}  // namespace actc::compression

#pragma once

#include <stdexcept>
#include <string>

namespace actc {

// Base class for all library errors so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct InvalidArgument : Error { using Error::Error; };

// topology
struct NotColumnStochastic : Error { using Error::Error; };
struct NotStronglyConnected : Error { using Error::Error; };
struct NoSelfLoop : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };

// model / theory
struct NotStronglyConvex : Error { using Error::Error; };
struct SingularAggregate : Error { using Error::Error; };
struct NonPositive : Error { using Error::Error; };

// allocation
struct Infeasible : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };

// harness
struct UnknownPreset : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace actc

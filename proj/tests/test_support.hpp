#pragma once

// Minimal check macros shared by the module tests. Failures print the file
// and line, the test keeps running, and main() returns the failure count.

#include <cmath>
#include <cstdio>

namespace testsupport {

inline int failures = 0;
inline int checks = 0;

inline bool close(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return false;
  return std::fabs(a - b) <= tol;
}

// Relative comparison with an absolute floor for values near zero.
inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-300) {
  if (std::isnan(a) || std::isnan(b)) return false;
  const double scale = std::fmax(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= std::fmax(rel * scale, abs_floor);
}

inline int summary(const char* name) {
  if (failures == 0) {
    std::printf("%s: all %d checks passed\n", name, checks);
  } else {
    std::printf("%s: %d of %d checks FAILED\n", name, failures, checks);
  }
  return failures;
}

}  // namespace testsupport

#define CHECK(cond)                                                     \
  do {                                                                  \
    ++testsupport::checks;                                              \
    if (!(cond)) {                                                      \
      ++testsupport::failures;                                          \
      std::fprintf(stderr, "[FAIL] %s:%d: %s\n", __FILE__, __LINE__, #cond); \
    }                                                                   \
  } while (0)

#define CHECK_MSG(cond, ...)                                            \
  do {                                                                  \
    ++testsupport::checks;                                              \
    if (!(cond)) {                                                      \
      ++testsupport::failures;                                          \
      std::fprintf(stderr, "[FAIL] %s:%d: %s  (", __FILE__, __LINE__, #cond); \
      std::fprintf(stderr, __VA_ARGS__);                                \
      std::fprintf(stderr, ")\n");                                      \
    }                                                                   \
  } while (0)

#define CHECK_CLOSE(a, b, tol)                                          \
  do {                                                                  \
    ++testsupport::checks;                                              \
    const double ts_a = (a);                                            \
    const double ts_b = (b);                                            \
    if (!testsupport::close(ts_a, ts_b, (tol))) {                       \
      ++testsupport::failures;                                          \
      std::fprintf(stderr, "[FAIL] %s:%d: |%s - %s| <= %s  (%.17g vs %.17g)\n", \
                   __FILE__, __LINE__, #a, #b, #tol, ts_a, ts_b);       \
    }                                                                   \
  } while (0)

#define CHECK_CLOSE_REL(a, b, rel)                                      \
  do {                                                                  \
    ++testsupport::checks;                                              \
    const double ts_a = (a);                                            \
    const double ts_b = (b);                                            \
    if (!testsupport::close_rel(ts_a, ts_b, (rel))) {                   \
      ++testsupport::failures;                                          \
      std::fprintf(stderr, "[FAIL] %s:%d: %s ~ %s rel %s  (%.17g vs %.17g)\n", \
                   __FILE__, __LINE__, #a, #b, #rel, ts_a, ts_b);       \
    }                                                                   \
  } while (0)

#define CHECK_THROWS(expr, ExceptionType)                               \
  do {                                                                  \
    ++testsupport::checks;                                              \
    bool ts_caught = false;                                             \
    try {                                                               \
      (void)(expr);                                                     \
    } catch (const ExceptionType&) {                                    \
      ts_caught = true;                                                 \
    } catch (...) {                                                     \
    }                                                                   \
    if (!ts_caught) {                                                   \
      ++testsupport::failures;                                          \
      std::fprintf(stderr, "[FAIL] %s:%d: expected %s from %s\n",       \
                   __FILE__, __LINE__, #ExceptionType, #expr);          \
    }                                                                   \
  } while (0)

#define CHECK_NOTHROW(expr)                                             \
  do {                                                                  \
    ++testsupport::checks;                                              \
    try {                                                               \
      (void)(expr);                                                     \
    } catch (const std::exception& ts_e) {                              \
      ++testsupport::failures;                                          \
      std::fprintf(stderr, "[FAIL] %s:%d: unexpected exception from %s: %s\n", \
                   __FILE__, __LINE__, #expr, ts_e.what());             \
    }                                                                   \
  } while (0)

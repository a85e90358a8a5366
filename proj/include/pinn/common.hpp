#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinn {

/// Argument/precondition violations (bad hyperparameters, empty batches, ...).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Structural inconsistencies (dimension mismatches, out-of-range node ids).
struct StructuralError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Math domain violations inside elementary operations (x/0, ln of x<=0).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Non-finite values where finite ones are required.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A problem cannot be hard-constrained (no closed-form IC / inhomogeneous BC).
struct UnsupportedConstraintError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A solver configuration violates its stability bound.
struct RejectedConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Config-file problems; `key_path` is "section.key" of the offending entry.
struct ConfigError : std::runtime_error {
  std::string key_path;
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), key_path(std::move(path)) {}
};

/// Closed interval [lo, hi] for one domain axis.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// ---------------------------------------------------------------------------
// Deterministic RNG.
//
// splitmix64 is used everywhere instead of <random> engines/distributions:
// uniform_real_distribution output is implementation-defined, and the run
// artifacts must be bit-identical for a fixed seed regardless of toolchain.
// ---------------------------------------------------------------------------

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream from (seed, tag) pairs, so that e.g. the
/// physics batch of iteration k never overlaps the init stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  SplitMix64 mix(seed ^ (0x517cc1b727220a95ull + tag * 0x2545f4914f6cdd1dull));
  return mix.next_u64();
}

// ---------------------------------------------------------------------------
// Small dense-vector helpers for the optimisers.
// ---------------------------------------------------------------------------

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline bool all_finite(std::span<const double> a) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace pinn

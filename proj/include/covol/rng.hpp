#pragma once

// Counter-based random number generation. Every draw is a pure function of
// (key, counter), with keys derived by hashing (seed, stream). Replicate r of
// an experiment uses the stream keyed by derive_seed(seed, r), so parallel
// and sequential execution produce identical results and any replicate can
// be regenerated in isolation.

#include <cmath>
#include <cstdint>

#include "covol/stats.hpp"

namespace covol {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derive an independent stream key from a user seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed + kGoldenGamma) + (stream + 1) * kGoldenGamma);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(derive_seed(seed, stream)) {}

  std::uint64_t next_u64() {
    counter_ += kGoldenGamma;
    return mix64(key_ + counter_);
  }

  /// Uniform on the open interval (0,1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_quantile(uniform01()); }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  /// Student t with integer dof, as Z0 / sqrt(chi2_dof / dof); consumes a
  /// fixed number of draws per variate.
  double student_t(int dof) {
    const double z = normal();
    double chi2 = 0.0;
    for (int k = 0; k < dof; ++k) {
      const double g = normal();
      chi2 += g * g;
    }
    return z / std::sqrt(chi2 / static_cast<double>(dof));
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace covol

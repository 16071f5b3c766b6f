#pragma once

#include <cstdint>
#include <limits>

namespace vlsm {

/// SplitMix64 finalizer (Steele, Lea & Flood).
std::uint64_t mix64(std::uint64_t x);

/// Deterministic random stream keyed by (seed, stream id).
///
/// Key derivation: key = mix64(seed ^ mix64(stream + 0x9E3779B97F4A7C15)).
/// The four 64-bit words of xoshiro256** state are the first four outputs of
/// a SplitMix64 generator started at `key`. Integer draws use Lemire's
/// multiply-and-reject method, so integer sequences are identical on every
/// platform; `normal()` additionally depends on libm log/sqrt/cos.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next();
  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  /// Standard normal via Box-Muller; one draw consumes two uniforms.
  double normal();

 private:
  std::uint64_t state_[4];
};

}  // namespace vlsm

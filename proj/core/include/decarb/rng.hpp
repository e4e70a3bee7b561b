#pragma once

#include <cstdint>
#include <limits>

namespace decarb {

/// Independent random streams, one per subsystem. Adding a stream never
/// perturbs the draws of another.
enum class Stream : std::uint64_t {
  Population = 1,
  TailImputation = 2,
  FirmSizes = 3,
  Network = 4,
  Diffusion = 5,
  Consumption = 6,
  SampleGenerator = 7,
  Shuffle = 8,
};

std::uint64_t mix64(std::uint64_t x);

/// Counter-based generator. The key is a hash of (seed, stream, a, b); the
/// n-th output is mix64(key + n * golden). Any (agent, quarter) pair gets its
/// own reproducible sequence regardless of evaluation order, which is what
/// makes parallel intent evaluation bit-identical to serial.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, Stream stream, std::uint64_t a = 0, std::uint64_t b = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform in [0, 1) with 53 bits of mantissa.
  double uniform();
  /// Uniform in (0, 1].
  double uniform_open_low();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace decarb

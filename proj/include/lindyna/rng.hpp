#pragma once

#include <cstdint>
#include <random>

namespace lindyna {

/// Deterministic random stream. Same seed, same draw sequence, on every
/// platform we build for. All randomness in the library flows through one of
/// these; streams are never shared between concurrent consumers.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be positive.
  int uniform_int(int n) {
    const auto x = next_u64();
    return static_cast<int>((static_cast<unsigned __int128>(x) * static_cast<std::uint64_t>(n)) >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Derives an independent child seed from a base seed and a stream id.
  /// splitmix64-style finalizer; collision-free enough for trial fan-out.
  static std::uint64_t derive(std::uint64_t base, std::uint64_t stream_id) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace lindyna

#pragma once

#include <cstdint>
#include <random>

namespace bohr {

/// Portable seeded stream. std::mt19937_64 output is fixed by the standard;
/// the real-valued draws are derived here rather than through
/// std::uniform_real_distribution, whose algorithm is implementation-defined.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed) : engine_(mix(seed)) {}
  SeededStream(std::uint64_t seed, std::uint64_t stream)
      : engine_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace bohr

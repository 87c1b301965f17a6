#pragma once

#include <cstdint>
#include <random>

namespace mmelas {

/// Seeded generator whose output is identical across standard libraries.
///
/// std::uniform_real_distribution is implementation-defined, so the
/// conversion from raw 64-bit draws to doubles is done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mmelas

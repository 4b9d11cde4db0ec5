#pragma once

// Counter-based random streams. A stream is addressed by
// (seed, phase, step, cell) and draws are pure functions of the draw
// counter, so any lane can be replayed or consumed concurrently with
// bit-identical results regardless of thread count.

#include <cstdint>

#include "cofra/vec3.hpp"

namespace cofra {

enum class Phase : std::uint64_t {
  generic = 0,
  mc_integrate = 1,
  admissible_sampling = 2,
  density_sampling = 3,
  audit_symmetry = 4,
  audit_structure = 5,
  audit_growth = 6,
  audit_bounds = 7,
  audit_comparison = 8,
  audit_weight = 9,
  dsmc_init = 10,
  dsmc_coag = 11,
  dsmc_frag = 12,
  b1_cache = 13,
  gronwall = 14,
  verify = 15,
};

namespace detail {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}
}  // namespace detail

class StreamKey {
 public:
  StreamKey() : StreamKey(0, Phase::generic, 0, 0) {}
  StreamKey(std::uint64_t seed, Phase phase, std::uint64_t step = 0,
            std::uint64_t cell = 0)
      : counter_(0) {
    using detail::kGolden;
    using detail::mix64;
    std::uint64_t h = mix64(seed + kGolden);
    h = mix64(h ^ (static_cast<std::uint64_t>(phase) * 0xd6e8feb86659fd93ull));
    h = mix64(h ^ (step * 0xa0761d6478bd642full));
    base_ = mix64(h ^ (cell * 0xe7037ed1a0b428dbull));
  }

  std::uint64_t next_u64() {
    const std::uint64_t x = base_ + (counter_++) * detail::kGolden;
    return detail::mix64(detail::mix64(x));
  }

  /// Uniform double in [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in the open interval (0,1).
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (consumes two uniforms).
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.2831853071795864769 * u2);
  }

  /// Uniform point in the ball of given radius (rejection from the cube).
  Vec3 uniform_ball(double radius) {
    for (;;) {
      Vec3 v{uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
      if (norm2(v) < 1.0) return radius * v;
    }
  }

  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t base_;
  std::uint64_t counter_;
};

}  // namespace cofra

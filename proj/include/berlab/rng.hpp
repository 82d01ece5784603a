#pragma once
#include <cstdint>

#include "berlab/scalar_math.hpp"

namespace berlab {

// Keyed counter generator: output i is a pure function of (seed, trial, tag, i).
// Streams can therefore be evaluated out of order, at arbitrary offsets, and
// from any number of workers without shared state.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag)
      : base_(mix(mix(mix(seed + kGamma) ^ (trial + 0xd1b54a32d192ed03ULL)) ^
                  (tag + 0x8cb92ba72f3d8dd7ULL))) {}

  std::uint64_t bits(std::uint64_t index) const {
    return mix(base_ + (index + 1) * kGamma);
  }
  // Uniform on (0,1) with 53-bit resolution; never returns 0 or 1.
  double uniform(std::uint64_t index) const {
    return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
  }
  // Inverse-CDF transform of uniform(index).
  double normal(std::uint64_t index) const { return q_inv(uniform(index)); }

  std::uint64_t next_bits() { return bits(counter_++); }
  double next_uniform() { return uniform(counter_++); }
  double next_normal() { return normal(counter_++); }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

// Stream tags keep draws for the different random parts disjoint.
enum class Stream : std::uint64_t {
  kSignBits = 1,   // +/-1 transmitted vector
  kChannel = 2,    // channel matrix entries, row-major
  kNoise = 3,      // additive noise vector
  kAoNorm = 4,     // row-space Gaussian of the auxiliary optimization
  kAoOrder = 5,    // column-space Gaussian driving the order statistics
  kOrderStat = 6,  // standalone order-statistic experiments
};

inline std::uint64_t stream_tag(Stream s) { return static_cast<std::uint64_t>(s); }

}  // namespace berlab

#pragma once

#include <cstdint>

namespace dequant {

// 64-bit finalizer (splitmix64 / Stafford mix 13).
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Counter-based generator: draw i of stream (seed, stream) is
// mix64(key + i*gamma). Distinct shots use derived streams, so sampling
// results do not depend on the order in which shots are executed.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed) : key_(mix64(seed ^ kGamma)) {}

  // Independent stream for e.g. one shot: hash(seed, stream).
  static CounterRng derive(std::uint64_t seed, std::uint64_t stream) {
    CounterRng r(seed);
    r.key_ = mix64(r.key_ ^ mix64(stream + kGamma));
    return r;
  }

  std::uint64_t operator()() { return mix64(key_ + (++counter_) * kGamma); }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bit() { return ((*this)() >> 63) != 0; }

  // Uniform integer in [0, bound). Rejection-free modulo is fine here:
  // bounds in this project are tiny compared to 2^64.
  std::uint64_t below(std::uint64_t bound) { return (*this)() % bound; }

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~0ULL; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dequant

#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace nlsim {

std::uint64_t splitmix64(std::uint64_t x);

// Seed of sample i in an ensemble; injective in i for a fixed base seed.
std::uint64_t sample_seed(std::uint64_t base_seed, std::uint64_t index);

// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Stateless Gaussian source keyed by a 64-bit seed. Draw (stream, index)
// always returns the same value regardless of call order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  // Two independent uniforms in (0, 1].
  std::array<double, 2> uniform_pair(std::uint64_t stream, std::uint64_t index) const;

  // a + i b with a, b independent N(0, 1), so E|g|^2 = 2.
  std::complex<double> complex_gaussian(std::uint64_t stream, std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace nlsim

#include "nlsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace nlsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t sample_seed(std::uint64_t base_seed, std::uint64_t index) {
  return splitmix64(base_seed + index * 0x9E3779B97F4A7C15ULL);
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

std::array<double, 2> CounterRng::uniform_pair(std::uint64_t stream, std::uint64_t index) const {
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
       static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
      {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  const std::uint64_t w0 = (static_cast<std::uint64_t>(out[0]) << 32 | out[1]) >> 11;
  const std::uint64_t w1 = (static_cast<std::uint64_t>(out[2]) << 32 | out[3]) >> 11;
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return {(static_cast<double>(w0) + 1.0) * kScale, (static_cast<double>(w1) + 1.0) * kScale};
}

std::complex<double> CounterRng::complex_gaussian(std::uint64_t stream, std::uint64_t index) const {
  const auto u = uniform_pair(stream, index);
  const double radius = std::sqrt(-2.0 * std::log(u[0]));
  const double angle = 2.0 * std::numbers::pi * u[1];
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace nlsim

// Counter-based random numbers (Philox 4x32-10, Salmon et al. SC'11).
// Every draw is a pure function of (seed, stream, c0, c1, c2), so output
// never depends on evaluation order or thread schedule.

#ifndef QBSDE_RNG_HPP
#define QBSDE_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace qbsde {

// Stream tags keep independent consumers of one seed from colliding.
enum class RngStream : std::uint32_t {
  Brownian = 0,
  Certify = 1,
  Bootstrap = 2,
  Subsample = 3,
  ProblemGen = 4,
  Scratch = 5,
};

class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed, RngStream stream = RngStream::Brownian)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32) ^
                 (static_cast<std::uint32_t>(stream) * 0x9E3779B9u)} {}

  std::uint64_t seed_lo() const { return key_[0]; }

  // Four decorrelated 32-bit words at counter (c0, c1, c2).
  std::array<std::uint32_t, 4> words(std::uint64_t c0, std::uint64_t c1,
                                     std::uint64_t c2) const {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(c0), static_cast<std::uint32_t>(c0 >> 32),
        static_cast<std::uint32_t>(c1), static_cast<std::uint32_t>(c2)};
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      one_round(ctr, key);
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }

  // Uniform on the open interval (0, 1).
  double uniform(std::uint64_t c0, std::uint64_t c1, std::uint64_t c2) const {
    const auto w = words(c0, c1, c2);
    return to_unit(join(w[0], w[1]));
  }

  // Two independent standard normals via Box-Muller.
  std::array<double, 2> normal_pair(std::uint64_t c0, std::uint64_t c1,
                                    std::uint64_t c2) const {
    const auto w = words(c0, c1, c2);
    const double u1 = to_unit(join(w[0], w[1]));
    const double u2 = to_unit(join(w[2], w[3]));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  double normal(std::uint64_t c0, std::uint64_t c1, std::uint64_t c2) const {
    return normal_pair(c0, c1, c2)[0];
  }

private:
  static void one_round(std::array<std::uint32_t, 4>& ctr,
                        const std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }

  static std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
    return (std::uint64_t{hi} << 32) | lo;
  }

  // (x >> 11) has 53 random bits; the +0.5 offset keeps the value off 0 and 1.
  static double to_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  std::array<std::uint32_t, 2> key_;
};

}  // namespace qbsde

#endif

#pragma once

// Counter-based random streams. Every draw is a pure function of
// (seed, stream, domain, index), so replications can be evaluated in any
// order or on any thread and still reproduce bit-for-bit.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace collusion {

// Philox4x32 with 10 rounds (Salmon et al., Random123).
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t key)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  Block operator()(Block ctr) const {
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, k);
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Block single_round(const Block& c, const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }

  std::array<std::uint32_t, 2> key_;
};

// Sequential view of one (stream, domain) lane of a Philox generator.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream, std::uint32_t domain)
      : gen_(seed), stream_(stream), domain_(domain) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    if (used_ >= 2) refill();
    const std::uint32_t hi = block_[2 * used_] >> 5;
    const std::uint32_t lo = block_[2 * used_ + 1] >> 6;
    ++used_;
    return (hi * 67108864.0 + lo) * (1.0 / 9007199254740992.0);
  }

  // Uniform on (0, 1).
  double open_uniform() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  // Standard normal by Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(open_uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  void refill() {
    block_ = gen_({static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32), domain_, counter_++});
    used_ = 0;
  }

  Philox4x32 gen_;
  std::uint64_t stream_;
  std::uint32_t domain_;
  std::uint32_t counter_ = 0;
  Philox4x32::Block block_{};
  int used_ = 2;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace collusion

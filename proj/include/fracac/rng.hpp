#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace fracac {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed of replicate i under a master seed.
constexpr std::uint64_t derive(std::uint64_t master, std::uint64_t i) noexcept {
  return mix64(mix64(master) ^ mix64(i + 0x632BE59BD9B4E019ull));
}

// Purposes of the per-node substreams. Each node owns one stream per purpose,
// so two runs that share a master seed share every draw of a given purpose.
enum class Purpose : std::uint64_t {
  Lifetime = 1,
  Motion = 2,
  SmallJumps = 3,
  LargeJumps = 4,
  LargeJumpMotion = 5,
  Mark = 6,
  Vote = 7,
  Generic = 8,
};

// Counter-based stream: the k-th output is mix64(key + k*gamma).
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Stream(std::uint64_t key = 0) noexcept : state_(mix64(key)) {}
  constexpr Stream(std::uint64_t key, Purpose p) noexcept
      : state_(mix64(key ^ mix64(static_cast<std::uint64_t>(p) * 0xD1B54A32D192ED03ull))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0,1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double th = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Ulam-Harris labels are addressed through a running hash of the word.
constexpr std::uint64_t root_key(std::uint64_t seed) noexcept { return mix64(seed ^ 0xA0761D6478BD642Full); }
constexpr std::uint64_t child_key(std::uint64_t parent, int child) noexcept {
  return mix64(parent * 0xE7037ED1A0B428DBull + static_cast<std::uint64_t>(child));
}

}  // namespace fracac

#pragma once

#include <cmath>
#include <cstdint>

namespace remus {

// splitmix64, used for seeding and for stateless per-key draws.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Mixes a seed with a stream id so independent subsystems get
// decorrelated deterministic streams from one master seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + (stream << 1));
  splitmix64(s);
  return splitmix64(s);
}

// xoshiro256** by Blackman & Vigna. Hand-rolled so traces are
// reproducible across compilers and standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) { reseed(seed); }

  void reseed(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
    have_spare_ = false;
    spare_ = 0.0;
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller, one spare cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4] = {};
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Ornstein-Uhlenbeck process with exact discretization. The stationary
// standard deviation equals `std` regardless of the step size.
class OuProcess {
 public:
  OuProcess() = default;
  OuProcess(double std, double corr_time) : std_(std), tau_(corr_time) {}

  double step(double dt, Rng& rng) {
    if (std_ <= 0.0) return value_ = 0.0;
    if (tau_ <= 0.0) return value_ = std_ * rng.normal();
    const double phi = std::exp(-dt / tau_);
    value_ = phi * value_ + std_ * std::sqrt(1.0 - phi * phi) * rng.normal();
    return value_;
  }

  double value() const { return value_; }
  void reset(double v = 0.0) { value_ = v; }

 private:
  double std_ = 0.0;
  double tau_ = 1.0;
  double value_ = 0.0;
};

}  // namespace remus

#pragma once

#include <cstdint>
#include <random>

namespace aoisat {

/// Independent random substreams derived from one master seed. Each
/// subsystem draws from its own stream so that, e.g., changing the policy's
/// sampling does not perturb the availability sample path.
enum class Stream : std::uint64_t {
  availability = 1,
  packets = 2,
  policy = 3,
  mobility = 4,
  coverage = 5,
  oracle = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

  Rng(std::uint64_t master_seed, Stream stream) {
    reseed(splitmix64(master_seed ^ splitmix64(static_cast<std::uint64_t>(stream) * 0x2545f4914f6cdd1dULL)));
  }

  void reseed(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(splitmix64(seed)), 0x41614f49u};
    engine_.seed(seq);
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits; independent of the standard
  // library's distribution implementations so streams are portable.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire's nearly-divisionless method would be faster; n is tiny here.
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  // Number of Bernoulli(p) trials up to and including the first success.
  std::int64_t trials_to_success(double p) {
    std::int64_t n = 1;
    while (!bernoulli(p)) ++n;
    return n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aoisat

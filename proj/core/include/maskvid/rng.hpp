#pragma once

#include <cmath>
#include <cstdint>

namespace maskvid {

// splitmix64 generator. All randomness in the project flows through this so
// that a run is reproducible from its seed alone, independent of platform
// and standard-library version.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1), both endpoints excluded, so log(u) and log(-log(u))
  // are always finite.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Requires n >= 1.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  static double gumbel_from_uniform(double u) { return -std::log(-std::log(u)); }

  double gumbel() { return gumbel_from_uniform(uniform_open()); }

 private:
  std::uint64_t state_;
};

// Stable seed for a named sub-stream (data generation, training, decoding);
// keeps stages decoupled so rerunning one does not shift another's stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  Rng r(base ^ (tag * 0x9e3779b97f4a7c15ull + 0x6a09e667f3bcc909ull));
  return r.next_u64();
}

}  // namespace maskvid

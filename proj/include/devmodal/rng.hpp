#pragma once

#include <cstdint>
#include <vector>

namespace devmodal {

// SplitMix64. Chosen over std::mt19937_64 + distributions because the
// standard does not pin down distribution output, and sweeps must be
// byte-reproducible across compilers.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). n must be > 0. Modulo bias is irrelevant at the
  // sweep sizes used here and keeps the generator trivially portable.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  bool coin() { return (next() & 1) != 0; }

  // True with probability num/den.
  bool chance(std::size_t num, std::size_t den) { return below(den) < num; }

  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[below(xs.size())];
  }

private:
  std::uint64_t state_;
};

}  // namespace devmodal

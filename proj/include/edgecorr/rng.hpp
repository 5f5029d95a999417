#ifndef EDGECORR_RNG_HPP
#define EDGECORR_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace edgecorr {

/// SplitMix64 (Steele, Lea, Flood 2014): 64-bit state, fixed output
/// function. Every draw below is derived from next() with explicit
/// arithmetic, so sequences are identical on every platform, unlike the
/// <random> distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() noexcept { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform integer in [0, n), unbiased by rejection. n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (std::uint64_t{0} - n) % n;
    std::uint64_t x;
    do x = next();
    while (x < threshold);
    return x % n;
  }

  bool coin() noexcept { return (next() >> 63) != 0; }

  /// Fisher-Yates, back to front.
  template <typename T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t k = v.size(); k > 1; --k) std::swap(v[k - 1], v[below(k)]);
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream seed from a base seed and a label.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t label) noexcept {
  SplitMix64 g(seed ^ (label * 0xD1B54A32D192ED03ULL));
  return g.next();
}

}  // namespace edgecorr

#endif  // EDGECORR_RNG_HPP

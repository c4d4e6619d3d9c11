#ifndef ANCHORREFINE_CORE_HASHING_H_
#define ANCHORREFINE_CORE_HASHING_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace anchorrefine {

inline constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

// 64-bit FNV-1a. Stable across platforms and runs.
uint64_t Fnv1a64(std::string_view bytes, uint64_t state = kFnvOffset);
uint64_t Fnv1a64(std::span<const double> values, uint64_t state = kFnvOffset);

// splitmix64 finalizer.
constexpr uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Fixed-width lowercase hex.
std::string HashToHex(uint64_t hash);
uint64_t HexToHash(std::string_view hex);

// Counter-based generator: the i-th draw is a pure function of
// (key, stream, i), so streams can be consumed in any order or in parallel
// without changing values.
class CounterRng {
 public:
  explicit CounterRng(uint64_t key, uint64_t stream = 0)
      : key_(key), stream_(stream) {}

  uint64_t NextU64() {
    return Mix64(Mix64(key_ ^ Mix64(stream_)) + counter_++ * 0xd1b54a32d192ed03ULL);
  }
  // Uniform in [0, 1) with 53 bits of resolution.
  double Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Standard normal via Box-Muller; consumes two draws.
  double Normal();
  // Uniform integer in [0, n).
  uint64_t Below(uint64_t n);

  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t stream_;
  uint64_t counter_ = 0;
};

}  // namespace anchorrefine

#endif  // ANCHORREFINE_CORE_HASHING_H_

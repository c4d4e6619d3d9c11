#include "anchorrefine/core/hashing.h"

#include <bit>
#include <cmath>
#include <numbers>

#include "anchorrefine/core/errors.h"

namespace anchorrefine {

uint64_t Fnv1a64(std::string_view bytes, uint64_t state) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

uint64_t Fnv1a64(std::span<const double> values, uint64_t state) {
  for (double v : values) {
    uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      state ^= bits & 0xffU;
      state *= 0x100000001b3ULL;
      bits >>= 8;
    }
  }
  return state;
}

std::string HashToHex(uint64_t hash) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kDigits[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

uint64_t HexToHash(std::string_view hex) {
  AR_EXPECT(hex.size() == 16, "hash must be 16 hex digits");
  uint64_t value = 0;
  for (char c : hex) {
    value <<= 4;
    if (c >= '0' && c <= '9') {
      value |= static_cast<uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      value |= static_cast<uint64_t>(c - 'a' + 10);
    } else {
      internal::Violation("invalid hex digit in hash");
    }
  }
  return value;
}

double CounterRng::Normal() {
  // 1 - U keeps the log argument in (0, 1].
  const double u1 = 1.0 - Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t CounterRng::Below(uint64_t n) {
  AR_EXPECT(n > 0, "empty range");
  // Rejection sampling removes modulo bias.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return x % n;
}

}  // namespace anchorrefine

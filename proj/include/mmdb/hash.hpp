#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mmdb {

// 64-bit FNV-1a. Used instead of std::hash so that hashes embedded in
// persisted artifacts are stable across standard library implementations.
inline uint64_t fnv1a64(std::string_view s, uint64_t seed = 0xcbf29ce484222325ull) {
  uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= static_cast<uint64_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Mixes an extra 64-bit value into a running hash.
inline uint64_t hash_mix(uint64_t h, uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (i * 8)) & 0xffull;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hash_hex(uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace mmdb

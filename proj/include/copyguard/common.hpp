#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace copyguard {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define COPYGUARD_DEFINE_ERROR(NAME)            \
  class NAME : public Error {                   \
   public:                                      \
    using Error::Error;                         \
  }

COPYGUARD_DEFINE_ERROR(ParseError);
COPYGUARD_DEFINE_ERROR(ValidationError);
COPYGUARD_DEFINE_ERROR(ServiceError);
COPYGUARD_DEFINE_ERROR(EmptyResponse);
COPYGUARD_DEFINE_ERROR(IngestError);
COPYGUARD_DEFINE_ERROR(UnknownTerm);
COPYGUARD_DEFINE_ERROR(DimMismatch);
COPYGUARD_DEFINE_ERROR(ZeroVector);
COPYGUARD_DEFINE_ERROR(UnparseableVerdict);
COPYGUARD_DEFINE_ERROR(EmbedderMismatch);
COPYGUARD_DEFINE_ERROR(MissingRanking);
COPYGUARD_DEFINE_ERROR(OracleMissing);
COPYGUARD_DEFINE_ERROR(RewriteFailure);
COPYGUARD_DEFINE_ERROR(BackendError);
COPYGUARD_DEFINE_ERROR(PolicyRefusal);
COPYGUARD_DEFINE_ERROR(MissingCharacter);
COPYGUARD_DEFINE_ERROR(DegenerateVariance);
COPYGUARD_DEFINE_ERROR(ConfigError);
COPYGUARD_DEFINE_ERROR(RunFailure);

#undef COPYGUARD_DEFINE_ERROR

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t seed = kFnvOffsetBasis) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64_mix(std::uint64_t value, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffu;
    h *= kFnvPrime;
  }
  return h;
}

inline std::string to_hex(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

// Uniform draw in [0, n) from an mt19937_64 stream. Rejection sampling keeps
// the result identical across standard library implementations, unlike
// std::uniform_int_distribution.
inline std::uint64_t rng_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw Error("rng_below: n must be positive");
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % n;
}

inline std::string base64_encode(std::string_view data) {
  static constexpr char table[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= data.size()) {
    const std::uint32_t v = (static_cast<unsigned char>(data[i]) << 16) |
                            (static_cast<unsigned char>(data[i + 1]) << 8) |
                            static_cast<unsigned char>(data[i + 2]);
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out.push_back(table[(v >> 6) & 63]);
    out.push_back(table[v & 63]);
    i += 3;
  }
  const std::size_t rest = data.size() - i;
  if (rest == 1) {
    const std::uint32_t v = static_cast<unsigned char>(data[i]) << 16;
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out.append("==");
  } else if (rest == 2) {
    const std::uint32_t v = (static_cast<unsigned char>(data[i]) << 16) |
                            (static_cast<unsigned char>(data[i + 1]) << 8);
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out.push_back(table[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

inline std::string base64_decode(std::string_view text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::string out;
  int buffer = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    const int v = value_of(c);
    if (v < 0) throw ParseError("base64_decode: invalid character");
    buffer = (buffer << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((buffer >> bits) & 0xff));
    }
  }
  return out;
}

}  // namespace copyguard

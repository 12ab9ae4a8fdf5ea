#include "lak/hash.hpp"

#include <bit>
#include <cstring>

#include "lak/error.hpp"

namespace lak {

void Fnv1a64::update(std::span<const std::byte> bytes) {
  for (std::byte b : bytes) {
    state_ ^= static_cast<std::uint8_t>(b);
    state_ *= kFnvPrime;
  }
}

void Fnv1a64::update(std::span<const std::uint8_t> bytes) {
  for (std::uint8_t b : bytes) {
    state_ ^= b;
    state_ *= kFnvPrime;
  }
}

void Fnv1a64::update_u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    state_ ^= (v >> (8 * i)) & 0xffU;
    state_ *= kFnvPrime;
  }
}

void Fnv1a64::update_f64(double v) { update_u64(std::bit_cast<std::uint64_t>(v)); }

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  Fnv1a64 h;
  h.update(bytes);
  return h.digest();
}

std::string to_hex(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xfU];
    v >>= 4;
  }
  return out;
}

std::uint64_t from_hex(std::string_view hex) {
  if (hex.empty() || hex.size() > 16) throw InvalidArgument("bad hex digest: '" + std::string(hex) + "'");
  std::uint64_t v = 0;
  for (char c : hex) {
    v <<= 4;
    if (c >= '0' && c <= '9') {
      v |= static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v |= static_cast<std::uint64_t>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      v |= static_cast<std::uint64_t>(c - 'A' + 10);
    } else {
      throw InvalidArgument("bad hex digest: '" + std::string(hex) + "'");
    }
  }
  return v;
}

}  // namespace lak

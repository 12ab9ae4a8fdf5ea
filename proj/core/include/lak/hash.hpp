#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace lak {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

// Incremental 64-bit FNV-1a. Shared by frame checksums, ingest digests and
// dataflow partition placement, so the constants above are part of the
// on-disk and cross-language contract.
class Fnv1a64 {
 public:
  constexpr Fnv1a64() = default;
  constexpr explicit Fnv1a64(std::uint64_t state) : state_(state) {}

  constexpr void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= kFnvPrime;
    }
  }
  void update(std::span<const std::byte> bytes);
  void update(std::span<const std::uint8_t> bytes);

  // Mixes a value in its little-endian byte representation.
  void update_u64(std::uint64_t v);
  void update_f64(double v);

  [[nodiscard]] constexpr std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = kFnvOffsetBasis;
};

constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  Fnv1a64 h;
  h.update(bytes);
  return h.digest();
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

// 16 lowercase hex digits.
std::string to_hex(std::uint64_t v);
std::uint64_t from_hex(std::string_view hex);

}  // namespace lak

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <string>
#include <string_view>

namespace pbc {

/// A 160-bit unsigned integer stored as 20 big-endian bytes. Byte-wise
/// lexicographic order equals numeric order.
struct Digest {
  static constexpr std::size_t kBytes = 20;
  static constexpr unsigned kBits = 160;

  std::array<std::uint8_t, kBytes> bytes{};

  friend bool operator==(const Digest&, const Digest&) = default;
  friend std::strong_ordering operator<=>(const Digest& a, const Digest& b) {
    const int c = std::memcmp(a.bytes.data(), b.bytes.data(), kBytes);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  /// Sum modulo 2^160.
  Digest& operator+=(const Digest& other) noexcept {
    unsigned carry = 0;
    for (std::size_t i = kBytes; i-- > 0;) {
      const unsigned s = unsigned{bytes[i]} + other.bytes[i] + carry;
      bytes[i] = static_cast<std::uint8_t>(s);
      carry = s >> 8;
    }
    return *this;
  }
  friend Digest operator+(Digest a, const Digest& b) noexcept { return a += b; }

  /// Keeps only the low `bits` bits (a multiple of 8), zeroing the rest.
  Digest truncated(unsigned bits) const noexcept {
    Digest out;
    const std::size_t keep = bits / 8;
    for (std::size_t i = 0; i < keep && i < kBytes; ++i) {
      out.bytes[kBytes - 1 - i] = bytes[kBytes - 1 - i];
    }
    return out;
  }

  /// First 8 bytes as a big-endian integer; used as a bucket key.
  std::uint64_t prefix64() const noexcept {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | bytes[i];
    return v;
  }

  std::string hex() const;
  static Digest from_hex(std::string_view hex);

  static Digest from_u64(std::uint64_t v) noexcept {
    Digest d;
    for (std::size_t i = 0; i < 8; ++i) d.bytes[kBytes - 1 - i] = static_cast<std::uint8_t>(v >> (8 * i));
    return d;
  }
  static Digest max() noexcept {
    Digest d;
    d.bytes.fill(0xff);
    return d;
  }
};

}  // namespace pbc

template <>
struct std::hash<pbc::Digest> {
  std::size_t operator()(const pbc::Digest& d) const noexcept {
    std::uint64_t v;
    std::memcpy(&v, d.bytes.data() + 12, sizeof v);
    return static_cast<std::size_t>(v);
  }
};

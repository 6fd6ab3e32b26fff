#include "pbc/digest.hpp"

#include "pbc/errors.hpp"

namespace pbc {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string Digest::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(2 * kBytes, '0');
  for (std::size_t i = 0; i < kBytes; ++i) {
    s[2 * i] = kDigits[bytes[i] >> 4];
    s[2 * i + 1] = kDigits[bytes[i] & 0xf];
  }
  return s;
}

Digest Digest::from_hex(std::string_view hex) {
  if (hex.size() != 2 * kBytes) {
    throw InvalidParameterError("expected " + std::to_string(2 * kBytes) + " hex characters, got " +
                                std::to_string(hex.size()));
  }
  Digest d;
  for (std::size_t i = 0; i < kBytes; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw InvalidParameterError("invalid hex digit in \"" + std::string(hex) + "\"");
    d.bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return d;
}

}  // namespace pbc

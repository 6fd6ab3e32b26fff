#pragma once

#include <cstdint>
#include <string>

namespace pbc {

using u128 = unsigned __int128;

/// Exact C(n, k). Throws OverflowError if the result does not fit in 128 bits.
u128 binomial(std::uint64_t n, std::uint64_t k);

/// C(n, k) clamped to `cap`. Never overflows.
u128 binomial_capped(std::uint64_t n, std::uint64_t k, u128 cap);

/// C(n, k) narrowed to 64 bits; throws OverflowError when it does not fit.
std::uint64_t binomial64(std::uint64_t n, std::uint64_t k);

/// Floor of the square root, exact for all 128-bit inputs.
u128 isqrt(u128 x);

enum class InverseMode {
  Strict,    ///< throw NotBinomialError unless j is exactly C(m, k)
  Tolerant,  ///< return the largest m with C(m, k) <= j
};

/// The m >= k with C(m, k) == j, found by integer search on the monotone map
/// m -> C(m, k). inverse_binomial(0, k) == 0.
std::uint64_t inverse_binomial(std::uint64_t j, unsigned k, InverseMode mode = InverseMode::Strict);

std::string to_string(u128 v);

}  // namespace pbc

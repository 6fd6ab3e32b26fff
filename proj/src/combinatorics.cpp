#include "pbc/combinatorics.hpp"

#include <algorithm>
#include <limits>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

constexpr u128 kU128Max = ~u128{0};

u128 gcd128(u128 a, u128 b) {
  while (b) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Multiplicative formula: after step i the accumulator holds C(n-k+i, i), so
// every intermediate division is exact.
bool binomial_impl(std::uint64_t n, std::uint64_t k, u128 cap, u128& out) {
  if (k > n) {
    out = 0;
    return true;
  }
  k = std::min(k, n - k);
  u128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const u128 factor = n - k + i;
    // acc * factor / i, guarded against overflow of the product.
    if (acc > kU128Max / factor) {
      // acc * factor is divisible by i, so i / gcd(acc, i) divides factor.
      const u128 g = gcd128(acc, i);
      const u128 a = acc / g;
      const u128 f = factor / (i / g);
      if (a > kU128Max / f) {
        out = cap;
        return false;
      }
      acc = a * f;
    } else {
      acc = acc * factor / i;
    }
    if (acc > cap) {
      out = cap;
      return false;
    }
  }
  out = acc;
  return true;
}

}  // namespace

u128 binomial(std::uint64_t n, std::uint64_t k) {
  u128 out = 0;
  if (!binomial_impl(n, k, kU128Max, out)) {
    throw OverflowError("C(" + std::to_string(n) + ", " + std::to_string(k) + ") exceeds 128 bits");
  }
  return out;
}

u128 binomial_capped(std::uint64_t n, std::uint64_t k, u128 cap) {
  u128 out = 0;
  binomial_impl(n, k, cap, out);
  return std::min(out, cap);
}

std::uint64_t binomial64(std::uint64_t n, std::uint64_t k) {
  const u128 v = binomial(n, k);
  if (v > std::numeric_limits<std::uint64_t>::max()) {
    throw OverflowError("C(" + std::to_string(n) + ", " + std::to_string(k) + ") exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(v);
}

u128 isqrt(u128 x) {
  if (x < 2) return x;
  // Newton iteration from an overestimate converges monotonically downward.
  u128 r = x;
  int bits = 0;
  for (u128 t = x; t; t >>= 1) ++bits;
  // The root is below 2^64, so start no higher than 2^64 - 1 to keep r * r
  // representable.
  const u128 max_root = (u128{1} << 64) - 1;
  r = bits >= 127 ? max_root : u128{1} << ((bits + 1) / 2);
  while (true) {
    const u128 next = (r + x / r) / 2;
    if (next >= r) break;
    r = next;
  }
  while (r > x / r) --r;
  while (r < max_root && (r + 1) <= x / (r + 1)) ++r;
  return r;
}

std::uint64_t inverse_binomial(std::uint64_t j, unsigned k, InverseMode mode) {
  if (k == 0) throw InvalidParameterError("inverse_binomial requires k >= 1");
  if (j == 0) return 0;
  if (k == 1) return j;

  const u128 target = j;
  const u128 cap = target + 1;
  // Exponential search for an upper bound, then binary search on [lo, hi].
  std::uint64_t lo = k;  // C(k, k) = 1 <= j
  std::uint64_t hi = 2 * static_cast<std::uint64_t>(k);
  while (binomial_capped(hi, k, cap) <= target) {
    lo = hi;
    hi *= 2;
  }
  // Invariant: C(lo, k) <= j < C(hi, k).
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (binomial_capped(mid, k, cap) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (mode == InverseMode::Strict && binomial_capped(lo, k, cap) != target) {
    throw NotBinomialError(j, k);
  }
  return lo;
}

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace pbc

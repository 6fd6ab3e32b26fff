#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pbc/combinatorics.hpp"

namespace pbc {

inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSecondsPerYear = 31557600.0;  // Julian year

/// Single-threaded cost of a preimage attack on one document: the attacker
/// hashes every k-subset of a universe of n_refs candidate references.
struct AttackEstimate {
  std::uint64_t n_refs = 0;
  unsigned k = 0;
  double per_hash_seconds = 0;
  u128 n_hashes = 0;  ///< exact C(n_refs, k)
  long double runtime_seconds = 0;

  double runtime_hours() const { return static_cast<double>(runtime_seconds / kSecondsPerHour); }
  double runtime_years() const { return static_cast<double>(runtime_seconds / kSecondsPerYear); }
  /// "1.40 h", "404 years", "680 million years", ...
  std::string runtime_human() const;
};

AttackEstimate estimate(std::uint64_t n_refs, unsigned k, double per_hash_seconds);

/// Smallest n with C(n, k) * per_hash_seconds > budget_seconds.
std::uint64_t min_universe_for_budget(unsigned k, double per_hash_seconds, double budget_seconds);

std::vector<AttackEstimate> sweep(std::span<const unsigned> k_values, std::span<const std::uint64_t> n_values,
                                  double per_hash_seconds);

/// The three rows for the 5.05 million dblp records at 1 ms per hash.
std::vector<AttackEstimate> dblp_preset();

std::string sweep_csv(std::span<const AttackEstimate> rows);
std::string sweep_table(std::span<const AttackEstimate> rows);

}  // namespace pbc

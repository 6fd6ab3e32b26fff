#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pbc/combinatorics.hpp"
#include "pbc/psihash.hpp"

namespace pbc {

/// Exact non-negative rational, always stored in lowest terms.
class Fraction {
 public:
  Fraction() = default;
  Fraction(std::uint64_t num, std::uint64_t den);

  std::uint64_t num() const noexcept { return num_; }
  std::uint64_t den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// 12 significant digits, e.g. "0.2", "0.333333333333", "1", "0".
  std::string decimal() const;
  /// "num/den".
  std::string str() const;

  friend bool operator==(const Fraction&, const Fraction&) = default;
  friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b);

 private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

using SimilarityScore = Fraction;

/// Classical bibliographic coupling strength |A n B| / |A u B| over sets of
/// norm_keys. Duplicates within an argument are ignored.
SimilarityScore bc_strength(std::span<const std::string> refs_a, std::span<const std::string> refs_b);

/// |A n B| of two strictly ascending hash sets.
std::uint64_t intersection_size(const HashSet& a, const HashSet& b);

/// Jaccard over hash sets.
SimilarityScore pbc_strength(const HashSet& a, const HashSet& b);

/// Jaccard from the three counts. Throws EmptySetError when both sets are empty.
SimilarityScore jaccard_from_counts(std::uint64_t intersection, std::uint64_t size_a, std::uint64_t size_b);

/// Reference-level coupling strength recovered from hash-set counts by
/// inverting C(m, k) on each of them.
SimilarityScore recovered_bc_from_counts(std::uint64_t intersection, std::uint64_t size_a, std::uint64_t size_b,
                                         unsigned k, InverseMode mode = InverseMode::Strict);
SimilarityScore recovered_bc(const HashSet& a, const HashSet& b, InverseMode mode = InverseMode::Strict);

struct PairResult {
  std::string doc_id_a;
  std::string doc_id_b;
  std::uint64_t intersection_hashes = 0;
  std::uint64_t size_b = 0;  ///< |H_d'| of the candidate
  SimilarityScore s_pbc;
  std::optional<SimilarityScore> s_bc_recovered;  ///< empty when a count is not a binomial number

  friend bool operator==(const PairResult&, const PairResult&) = default;
};

struct Overlap {
  std::string doc_id;
  std::uint64_t intersection = 0;
  std::uint64_t size = 0;  ///< |H_d'|
};

/// Scores every candidate against the query, drops zero intersections and
/// sorts by s_pbc descending, then doc_id ascending.
std::vector<PairResult> rank_candidates(const HashSet& query, std::span<const Overlap> overlaps);

/// Counts the matched hashes whose posting list, with the query's own document
/// added, is exactly {doc_a, doc_b}. Each posting list must be sorted.
std::uint64_t pair_exclusive_filter(std::span<const std::vector<std::string>> postings, const std::string& doc_a,
                                    const std::string& doc_b);

}  // namespace pbc

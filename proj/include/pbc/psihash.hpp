#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pbc/digest.hpp"
#include "pbc/refmodel.hpp"

namespace pbc {

/// How the k member digests of a subset are combined into one SubsetHash.
enum class CombineMode {
  ModularSum,        ///< sum of the member digests modulo 2^160 (default)
  SortedConcatSha1,  ///< SHA-1 over the ascending member digests, concatenated
};

/// Identifies the digest function plus combination mode. Indexes and queries
/// must agree on it.
std::string hash_fn_id(CombineMode mode);
CombineMode combine_mode_from_id(std::string_view id);
inline const std::string kDefaultHashFnId = "sha1-sum";

/// SHA-1 of the UTF-8 bytes of `norm_key`, read as a big-endian integer.
Digest digest_reference(std::string_view norm_key);

/// Combines exactly k digests. Order-invariant in both modes.
Digest combine(std::span<const Digest> digests, std::size_t k, CombineMode mode = CombineMode::ModularSum);

/// Calls `visit` once per k-combination of the indices [0, n), in
/// lexicographic order. Each combination is passed as ascending indices.
/// Throws TooFewRefsError when n < k.
void for_each_combination(std::size_t n, std::size_t k,
                          const std::function<void(std::span<const std::size_t>)>& visit);

/// All k-combinations of `refs` ordered lexicographically over the sorted
/// norm_keys. Each subset lists its members in ascending norm_key order.
std::vector<std::vector<Reference>> enumerate_subsets(std::span<const Reference> refs, std::size_t k);

/// H_d: the set of combined subset hashes for one document.
struct HashSet {
  std::string doc_id;
  std::size_t k = 1;
  std::string hash_fn_id = kDefaultHashFnId;
  std::vector<Digest> hashes;  // sorted ascending, unique

  std::size_t size() const noexcept { return hashes.size(); }
  bool empty() const noexcept { return hashes.empty(); }
  bool contains(const Digest& d) const;

  /// Sorts and deduplicates `hashes`; returns the number of duplicates removed.
  std::size_t canonicalize();

  friend bool operator==(const HashSet&, const HashSet&) = default;
};

struct HashOutcome {
  HashSet set;
  std::uint64_t expected = 0;    ///< C(|refs|, k)
  std::uint64_t collisions = 0;  ///< expected - |set|; nonzero means combined hashes collided
};

/// Hashes every k-subset of the document's references.
HashOutcome hash_document_checked(const Document& doc, std::size_t k, CombineMode mode = CombineMode::ModularSum);

/// Same as hash_document_checked, dropping the diagnostic.
HashSet hash_document(const Document& doc, std::size_t k, CombineMode mode = CombineMode::ModularSum);

/// Hashes a query's digests directly; useful on the client side where only
/// norm_keys are known.
HashSet hash_keys(std::string doc_id, std::span<const std::string> norm_keys, std::size_t k,
                  CombineMode mode = CombineMode::ModularSum);

/// Number of unordered pairs of distinct reference subsets, over the whole
/// corpus, whose combined hashes are equal. For width 32 each reference
/// digest is truncated to its low 32 bits and the sum is taken modulo 2^32.
std::uint64_t count_collisions(std::span<const Document> docs, std::size_t k, unsigned digest_width_bits,
                               unsigned threads = 1);

// Hash-set files. Binary: "PBCHSET1", k (u32 LE), count (u64 LE), then count
// 20-byte big-endian values sorted ascending. Text: one 40-char lowercase hex
// value per line.
void write_hashset_binary(const HashSet& set, std::ostream& out);
void write_hashset_hex(const HashSet& set, std::ostream& out);
/// Reads either format, detected by the magic bytes. hash_fn_id defaults to
/// the sum mode since neither format records it.
HashSet read_hashset(std::istream& in, std::string doc_id = "query");

}  // namespace pbc

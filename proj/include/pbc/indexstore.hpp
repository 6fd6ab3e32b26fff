#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pbc/psihash.hpp"
#include "pbc/similarity.hpp"

namespace pbc {

struct OccurrenceHistogram {
  std::uint64_t total_hashes = 0;  ///< distinct hashes in the index
  std::uint64_t in_1 = 0, in_2 = 0, in_3 = 0;
  Fraction ratio_in_1, ratio_in_2, ratio_in_3;

  friend bool operator==(const OccurrenceHistogram&, const OccurrenceHistogram&) = default;
};

/// Inverted index from subset hash to the documents containing it.
///
/// Documents are kept in a table sorted by doc_id; posting lists hold
/// positions in that table, so they are sorted by doc_id as well. Keys are a
/// sorted flat array with a radix directory over their leading bits, which
/// makes a lookup one directory probe plus a short binary search.
///
/// Instances are immutable once built. with_document() returns a new index,
/// which is what lets the service publish snapshots to concurrent readers.
class InvertedIndex {
 public:
  InvertedIndex() : InvertedIndex(1, kDefaultHashFnId) {}
  InvertedIndex(std::size_t k, std::string hash_fn_id);

  /// Builds from per-document hash sets. Every set must carry the same k and
  /// hash function; doc_ids must be unique.
  static InvertedIndex build(std::span<const HashSet> sets, std::size_t k, std::string hash_fn_id);
  /// Hashes every document (in parallel) and builds. Documents with fewer
  /// than k references are skipped.
  static InvertedIndex build(const Corpus& corpus, std::size_t k, CombineMode mode = CombineMode::ModularSum,
                             unsigned threads = 1);

  std::size_t k() const noexcept { return k_; }
  const std::string& hash_fn_id() const noexcept { return hash_fn_id_; }
  std::size_t doc_count() const noexcept { return doc_ids_.size(); }
  std::size_t entry_count() const noexcept { return keys_.size(); }
  std::size_t posting_count() const noexcept { return postings_.size(); }
  bool empty() const noexcept { return keys_.empty(); }

  const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
  /// |H_d| for the document at table position `pos`.
  std::uint64_t doc_size(std::size_t pos) const { return doc_sizes_.at(pos); }
  /// |H_d| by id; 0 when absent.
  std::uint64_t doc_size(std::string_view doc_id) const;
  bool contains_doc(std::string_view doc_id) const;

  const std::vector<Digest>& keys() const noexcept { return keys_; }
  /// Posting list (doc_ids, ascending) of one hash; empty if absent.
  std::vector<std::string> postings(const Digest& hash) const;

  /// Exact shared-hash count for every document with at least one match,
  /// ordered by doc_id.
  std::vector<Overlap> intersect(const HashSet& query) const;
  /// Like intersect, but a shared hash only counts when the query document and
  /// the candidate are the only two documents holding it.
  std::vector<Overlap> intersect_exclusive(const HashSet& query) const;

  /// Throws EmptySetError for an index without hashes.
  OccurrenceHistogram occurrence_histogram() const;

  /// Adds or replaces the document `set.doc_id`.
  InvertedIndex with_document(const HashSet& set) const;

  void write(std::ostream& out) const;
  static InvertedIndex read(std::istream& in);
  /// Writes atomically (temporary file + rename). Returns the byte size.
  std::uintmax_t persist(const std::filesystem::path& path) const;
  static InvertedIndex load(const std::filesystem::path& path);
  /// Size of the serialized form in bytes.
  std::uint64_t serialized_size() const;

  /// Checks every structural invariant; throws CorruptFileError on violation.
  void validate() const;

  /// Logical equality: same configuration, documents, sizes and postings.
  friend bool operator==(const InvertedIndex& a, const InvertedIndex& b);

 private:
  void check_query(const HashSet& query) const;
  std::size_t find(const Digest& hash) const;  // keys_.size() when absent
  /// find() over many hashes at once, overlapping their cache misses.
  void find_batch(std::span<const Digest> hashes, std::vector<std::size_t>& found) const;
  void rebuild_directory();

  std::size_t k_;
  std::string hash_fn_id_;
  std::vector<std::string> doc_ids_;      // ascending
  std::vector<std::uint64_t> doc_sizes_;  // parallel to doc_ids_
  std::vector<Digest> keys_;              // ascending, unique
  std::vector<std::uint64_t> offsets_;    // keys_.size() + 1 entries into postings_
  std::vector<std::uint32_t> postings_;   // doc table positions, ascending per key
  unsigned dir_bits_ = 0;
  std::vector<std::uint32_t> directory_;  // (1 << dir_bits_) + 1 entries into keys_
};

/// Human-readable statistics block (entries, postings, histogram, bytes).
std::string stats_text(const InvertedIndex& index);

}  // namespace pbc

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pbc {

/// Canonical hash input for a reference title: NFKC normalized, lowercased,
/// every non-alphanumeric code point replaced by a space, whitespace runs
/// collapsed and trimmed. Throws EmptyKeyError when nothing is left.
std::string normalize_title(std::string_view raw);

struct Reference {
  std::string raw_title;
  std::vector<std::string> authors;
  std::optional<int> year;
  std::string norm_key;

  /// Builds a reference and derives norm_key from the title.
  static Reference from_title(std::string title, std::vector<std::string> authors = {},
                              std::optional<int> year = std::nullopt);

  friend bool operator==(const Reference&, const Reference&) = default;
};

/// One reference per distinct norm_key, keeping the first occurrence and the
/// input order of the survivors.
std::vector<Reference> dedup_references(std::span<const Reference> refs);

struct Document {
  std::string doc_id;
  std::vector<Reference> refs;  // distinct norm_keys

  Document() = default;
  /// Deduplicates `refs` on construction.
  Document(std::string id, std::span<const Reference> refs);

  std::size_t size() const noexcept { return refs.size(); }
  /// norm_keys sorted ascending.
  std::vector<std::string> sorted_keys() const;

  friend bool operator==(const Document&, const Document&) = default;
};

inline constexpr std::size_t kDefaultMaxRefs = 150;

/// k <= |refs| <= max_refs.
bool eligible(const Document& doc, std::size_t k, std::size_t max_refs = kDefaultMaxRefs);

struct Corpus {
  std::vector<Document> documents;
  std::size_t k = 1;
  std::size_t max_refs = kDefaultMaxRefs;
};

}  // namespace pbc

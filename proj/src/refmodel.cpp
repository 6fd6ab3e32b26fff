#include "pbc/refmodel.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/locid.h>

#include <algorithm>
#include <unordered_set>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

const icu::Normalizer2& nfkc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw Error(std::string("ICU NFKC normalizer unavailable: ") + u_errorName(status));
  }
  return *n;
}

icu::UnicodeString normalized(const icu::Normalizer2& n, const icu::UnicodeString& s) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = n.normalize(s, status);
  if (U_FAILURE(status)) throw Error(std::string("NFKC normalization failed: ") + u_errorName(status));
  return out;
}

}  // namespace

std::string normalize_title(std::string_view raw) {
  const icu::Normalizer2& n = nfkc();
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  text = normalized(n, text);
  text.toLower(icu::Locale::getRoot());
  // Lowercasing can produce sequences NFKC would rewrite again.
  text = normalized(n, text);

  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < text.length();) {
    const UChar32 c = text.char32At(i);
    i += U16_LENGTH(c);
    if (u_isalnum(c)) {
      if (pending_space && !out.isEmpty()) out.append(UChar(' '));
      pending_space = false;
      out.append(c);
    } else {
      pending_space = true;
    }
  }

  std::string key;
  out.toUTF8String(key);
  if (key.empty()) throw EmptyKeyError(std::string(raw));
  return key;
}

Reference Reference::from_title(std::string title, std::vector<std::string> authors, std::optional<int> year) {
  Reference r;
  r.norm_key = normalize_title(title);
  r.raw_title = std::move(title);
  r.authors = std::move(authors);
  r.year = year;
  return r;
}

std::vector<Reference> dedup_references(std::span<const Reference> refs) {
  std::vector<Reference> out;
  out.reserve(refs.size());
  std::unordered_set<std::string_view> seen;
  seen.reserve(refs.size());
  for (const auto& r : refs) {
    if (seen.insert(r.norm_key).second) out.push_back(r);
  }
  return out;
}

Document::Document(std::string id, std::span<const Reference> input)
    : doc_id(std::move(id)), refs(dedup_references(input)) {}

std::vector<std::string> Document::sorted_keys() const {
  std::vector<std::string> keys;
  keys.reserve(refs.size());
  for (const auto& r : refs) keys.push_back(r.norm_key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

bool eligible(const Document& doc, std::size_t k, std::size_t max_refs) {
  return k <= doc.refs.size() && doc.refs.size() <= max_refs;
}

}  // namespace pbc

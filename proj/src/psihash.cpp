#include "pbc/psihash.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "pbc/combinatorics.hpp"
#include "pbc/errors.hpp"
#include "pbc/parallel.hpp"

namespace pbc {

namespace {

constexpr char kHashSetMagic[8] = {'P', 'B', 'C', 'H', 'S', 'E', 'T', '1'};

const EVP_MD* sha1_md() {
  static const EVP_MD* md = [] {
    const EVP_MD* fetched = EVP_MD_fetch(nullptr, "SHA1", nullptr);
    return fetched ? fetched : EVP_sha1();
  }();
  return md;
}

Digest sha1_bytes(const void* data, std::size_t len) {
  Digest d;
  unsigned int out_len = 0;
  if (EVP_Digest(data, len, d.bytes.data(), &out_len, sha1_md(), nullptr) != 1 || out_len != Digest::kBytes) {
    throw Error("SHA-1 computation failed");
  }
  return d;
}

Digest combine_unchecked(std::span<const Digest> digests, CombineMode mode) {
  if (mode == CombineMode::ModularSum) {
    Digest acc;
    for (const auto& d : digests) acc += d;
    return acc;
  }
  std::vector<Digest> sorted(digests.begin(), digests.end());
  std::sort(sorted.begin(), sorted.end());
  return sha1_bytes(sorted.data(), sorted.size() * Digest::kBytes);
}

// Visits every k-combination of [0, n) lexicographically, handing the visitor
// both the index tuple and, in sum mode, the running sum of member digests.
template <typename Visit>
void enumerate_indices(std::size_t n, std::size_t k, Visit&& visit) {
  if (k == 0 || k > n) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    visit(std::span<const std::size_t>(idx));
    // Find the rightmost position that can still advance.
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + (pos - 1)) --pos;
    if (pos == 0) return;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Combined hashes of every k-subset of `digests` (already in canonical
// member order), appended to `out`.
void subset_hashes(std::span<const Digest> digests, std::size_t k, CombineMode mode, std::vector<Digest>& out) {
  const std::size_t n = digests.size();
  if (mode == CombineMode::ModularSum) {
    // prefix[d] holds the sum of the first d members of the current subset.
    std::vector<Digest> prefix(k + 1);
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::size_t valid = 0;
    while (true) {
      for (std::size_t d = valid; d < k; ++d) prefix[d + 1] = prefix[d] + digests[idx[d]];
      out.push_back(prefix[k]);
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == n - k + (pos - 1)) --pos;
      if (pos == 0) return;
      ++idx[pos - 1];
      for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
      valid = pos - 1;
    }
  }
  std::vector<Digest> members(k);
  enumerate_indices(n, k, [&](std::span<const std::size_t> idx) {
    for (std::size_t j = 0; j < k; ++j) members[j] = digests[idx[j]];
    out.push_back(combine_unchecked(members, mode));
  });
}

std::vector<Digest> sorted_key_digests(std::span<const std::string> sorted_keys) {
  std::vector<Digest> digests;
  digests.reserve(sorted_keys.size());
  for (const auto& key : sorted_keys) digests.push_back(digest_reference(key));
  return digests;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>(v >> (8 * i));
  out.write(b, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
  out.write(b, 8);
}

std::uint64_t read_le(std::istream& in, int bytes) {
  unsigned char b[8] = {};
  if (!in.read(reinterpret_cast<char*>(b), bytes)) throw CorruptFileError("hash-set file truncated in header");
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace

std::string hash_fn_id(CombineMode mode) {
  return mode == CombineMode::ModularSum ? "sha1-sum" : "sha1-concat";
}

CombineMode combine_mode_from_id(std::string_view id) {
  if (id == "sha1-sum") return CombineMode::ModularSum;
  if (id == "sha1-concat") return CombineMode::SortedConcatSha1;
  throw InvalidParameterError("unknown hash function id: " + std::string(id));
}

Digest digest_reference(std::string_view norm_key) {
  if (norm_key.empty()) throw EmptyKeyError("");
  return sha1_bytes(norm_key.data(), norm_key.size());
}

Digest combine(std::span<const Digest> digests, std::size_t k, CombineMode mode) {
  if (k == 0 || digests.size() != k) {
    throw WrongArityError("combine expects exactly k = " + std::to_string(k) + " digests, got " +
                          std::to_string(digests.size()));
  }
  return combine_unchecked(digests, mode);
}

void for_each_combination(std::size_t n, std::size_t k,
                          const std::function<void(std::span<const std::size_t>)>& visit) {
  if (k == 0) throw InvalidParameterError("subset size k must be >= 1");
  if (n < k) {
    throw TooFewRefsError("need at least " + std::to_string(k) + " references, have " + std::to_string(n));
  }
  enumerate_indices(n, k, visit);
}

std::vector<std::vector<Reference>> enumerate_subsets(std::span<const Reference> refs, std::size_t k) {
  std::vector<const Reference*> ordered;
  ordered.reserve(refs.size());
  for (const auto& r : refs) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const Reference* a, const Reference* b) { return a->norm_key < b->norm_key; });

  std::vector<std::vector<Reference>> out;
  for_each_combination(ordered.size(), k, [&](std::span<const std::size_t> idx) {
    std::vector<Reference> subset;
    subset.reserve(k);
    for (std::size_t i : idx) subset.push_back(*ordered[i]);
    out.push_back(std::move(subset));
  });
  return out;
}

bool HashSet::contains(const Digest& d) const {
  return std::binary_search(hashes.begin(), hashes.end(), d);
}

std::size_t HashSet::canonicalize() {
  std::sort(hashes.begin(), hashes.end());
  const auto last = std::unique(hashes.begin(), hashes.end());
  const auto removed = static_cast<std::size_t>(hashes.end() - last);
  hashes.erase(last, hashes.end());
  return removed;
}

HashSet hash_keys(std::string doc_id, std::span<const std::string> norm_keys, std::size_t k, CombineMode mode) {
  if (k == 0) throw InvalidParameterError("subset size k must be >= 1");
  if (norm_keys.size() < k) {
    throw TooFewRefsError("document " + doc_id + " has " + std::to_string(norm_keys.size()) +
                          " references, fewer than k = " + std::to_string(k));
  }
  std::vector<std::string> keys(norm_keys.begin(), norm_keys.end());
  std::sort(keys.begin(), keys.end());
  const std::vector<Digest> digests = sorted_key_digests(keys);

  HashSet set;
  set.doc_id = std::move(doc_id);
  set.k = k;
  set.hash_fn_id = hash_fn_id(mode);
  set.hashes.reserve(static_cast<std::size_t>(binomial64(keys.size(), k)));
  subset_hashes(digests, k, mode, set.hashes);
  set.canonicalize();
  return set;
}

HashOutcome hash_document_checked(const Document& doc, std::size_t k, CombineMode mode) {
  const std::vector<std::string> keys = doc.sorted_keys();
  HashOutcome outcome;
  outcome.set = hash_keys(doc.doc_id, keys, k, mode);
  outcome.expected = binomial64(keys.size(), k);
  outcome.collisions = outcome.expected - outcome.set.size();
  return outcome;
}

HashSet hash_document(const Document& doc, std::size_t k, CombineMode mode) {
  return hash_document_checked(doc, k, mode).set;
}

std::uint64_t count_collisions(std::span<const Document> docs, std::size_t k, unsigned digest_width_bits,
                               unsigned threads) {
  if (digest_width_bits == 0 || digest_width_bits > Digest::kBits || digest_width_bits % 8 != 0) {
    throw InvalidParameterError("digest width must be a multiple of 8 in [8, 160]");
  }
  if (k == 0) throw InvalidParameterError("subset size k must be >= 1");

  // Global reference ids so that equal subsets in different documents are
  // recognised as the same subset.
  std::map<std::string, std::uint32_t> ids;
  for (const auto& doc : docs) {
    for (const auto& r : doc.refs) ids.emplace(r.norm_key, 0);
  }
  std::vector<Digest> key_digest;
  key_digest.reserve(ids.size());
  {
    std::uint32_t next = 0;
    for (auto& [key, id] : ids) {
      id = next++;
      key_digest.push_back(digest_reference(key).truncated(digest_width_bits));
    }
  }

  struct Entry {
    Digest hash;
    std::vector<std::uint32_t> members;
    bool operator<(const Entry& o) const {
      return hash != o.hash ? hash < o.hash : members < o.members;
    }
    bool operator==(const Entry& o) const { return hash == o.hash && members == o.members; }
  };

  std::vector<std::vector<Entry>> per_doc(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t d) {
    const Document& doc = docs[d];
    if (doc.refs.size() < k) return;
    std::vector<std::uint32_t> members;
    members.reserve(doc.refs.size());
    for (const auto& r : doc.refs) members.push_back(ids.at(r.norm_key));
    std::sort(members.begin(), members.end());
    auto& out = per_doc[d];
    enumerate_indices(members.size(), k, [&](std::span<const std::size_t> idx) {
      Entry e;
      e.members.reserve(k);
      for (std::size_t i : idx) {
        e.members.push_back(members[i]);
        e.hash += key_digest[members[i]];
      }
      e.hash = e.hash.truncated(digest_width_bits);
      out.push_back(std::move(e));
    });
  });

  // Single deduplicating consumer.
  std::vector<Entry> all;
  for (auto& v : per_doc) {
    std::move(v.begin(), v.end(), std::back_inserter(all));
    v.clear();
    v.shrink_to_fit();
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::uint64_t collisions = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i + 1;
    while (j < all.size() && all[j].hash == all[i].hash) ++j;
    const std::uint64_t m = j - i;
    collisions += m * (m - 1) / 2;
    i = j;
  }
  return collisions;
}

void write_hashset_binary(const HashSet& set, std::ostream& out) {
  out.write(kHashSetMagic, sizeof kHashSetMagic);
  write_u32(out, static_cast<std::uint32_t>(set.k));
  write_u64(out, set.hashes.size());
  for (const auto& h : set.hashes) out.write(reinterpret_cast<const char*>(h.bytes.data()), Digest::kBytes);
}

void write_hashset_hex(const HashSet& set, std::ostream& out) {
  for (const auto& h : set.hashes) out << h.hex() << '\n';
}

HashSet read_hashset(std::istream& in, std::string doc_id) {
  HashSet set;
  set.doc_id = std::move(doc_id);
  char magic[sizeof kHashSetMagic] = {};
  in.read(magic, sizeof magic);
  if (in.gcount() == sizeof magic && std::equal(magic, magic + sizeof magic, kHashSetMagic)) {
    set.k = static_cast<std::size_t>(read_le(in, 4));
    const std::uint64_t count = read_le(in, 8);
    set.hashes.resize(count);
    for (auto& h : set.hashes) {
      if (!in.read(reinterpret_cast<char*>(h.bytes.data()), Digest::kBytes)) {
        throw CorruptFileError("hash-set file truncated: expected " + std::to_string(count) + " values");
      }
    }
    if (!std::is_sorted(set.hashes.begin(), set.hashes.end()) ||
        std::adjacent_find(set.hashes.begin(), set.hashes.end()) != set.hashes.end()) {
      throw CorruptFileError("hash-set values are not strictly ascending");
    }
    return set;
  }
  // Text mode: rewind and read hex lines. k is unknown in this format.
  in.clear();
  in.seekg(0);
  std::string line;
  set.k = 0;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    set.hashes.push_back(Digest::from_hex(line));
  }
  set.canonicalize();
  return set;
}

}  // namespace pbc

#include "pbc/indexstore.hpp"

#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <sstream>

#include "pbc/errors.hpp"
#include "pbc/parallel.hpp"

namespace pbc {

namespace {

constexpr char kIndexMagic[8] = {'P', 'B', 'C', 'I', 'N', 'D', 'E', 'X'};
constexpr std::uint32_t kIndexVersion = 1;
constexpr unsigned kMaxDirBits = 22;

// Little helpers for the on-disk layout.
void put_le(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint64_t le(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(data_[pos_ + i]);
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      need(1);
      const auto b = static_cast<std::uint8_t>(data_[pos_++]);
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if ((b & 0x80) == 0) return v;
    }
    throw CorruptFileError("index file: varint too long");
  }

  std::string_view bytes(std::size_t n) {
    need(n);
    const auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const noexcept { return pos_; }
  bool done() const noexcept { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw CorruptFileError("index file truncated");
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

std::uint32_t crc(std::string_view body) {
  uLong c = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t off = 0; off < body.size(); off += kChunk) {
    const std::size_t len = std::min(kChunk, body.size() - off);
    c = crc32(c, reinterpret_cast<const Bytef*>(body.data() + off), static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(c);
}

}  // namespace

InvertedIndex::InvertedIndex(std::size_t k, std::string hash_fn_id)
    : k_(k), hash_fn_id_(std::move(hash_fn_id)), offsets_{0} {
  if (k_ == 0) throw InvalidParameterError("subset size k must be >= 1");
  rebuild_directory();
}

InvertedIndex InvertedIndex::build(std::span<const HashSet> sets, std::size_t k, std::string hash_fn_id) {
  InvertedIndex index(k, std::move(hash_fn_id));

  std::vector<std::size_t> order(sets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sets[a].doc_id < sets[b].doc_id; });

  std::size_t total = 0;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const HashSet& set = sets[order[pos]];
    if (set.k != k || set.hash_fn_id != index.hash_fn_id_) {
      throw ConfigMismatchError("hash set for " + set.doc_id + " does not match index configuration (k = " +
                                std::to_string(k) + ", " + index.hash_fn_id_ + ")");
    }
    if (pos > 0 && set.doc_id == index.doc_ids_.back()) throw InvalidParameterError("duplicate doc_id " + set.doc_id);
    index.doc_ids_.push_back(set.doc_id);
    index.doc_sizes_.push_back(set.size());
    total += set.size();
  }
  if (index.doc_ids_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidParameterError("too many documents for one index");
  }

  struct Posting {
    Digest hash;
    std::uint32_t doc;
    bool operator<(const Posting& o) const { return hash != o.hash ? hash < o.hash : doc < o.doc; }
  };
  std::vector<Posting> all;
  all.reserve(total);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    for (const auto& h : sets[order[pos]].hashes) all.push_back({h, static_cast<std::uint32_t>(pos)});
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end(),
                        [](const Posting& a, const Posting& b) { return a.hash == b.hash && a.doc == b.doc; }),
            all.end());

  index.postings_.reserve(all.size());
  index.offsets_.clear();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i == 0 || all[i].hash != all[i - 1].hash) {
      index.keys_.push_back(all[i].hash);
      index.offsets_.push_back(index.postings_.size());
    }
    index.postings_.push_back(all[i].doc);
  }
  index.offsets_.push_back(index.postings_.size());
  index.rebuild_directory();
  return index;
}

InvertedIndex InvertedIndex::build(const Corpus& corpus, std::size_t k, CombineMode mode, unsigned threads) {
  std::vector<HashSet> sets(corpus.documents.size());
  std::vector<char> keep(corpus.documents.size(), 0);
  parallel_for(corpus.documents.size(), threads, [&](std::size_t i) {
    const Document& doc = corpus.documents[i];
    if (doc.refs.size() < k) return;
    sets[i] = hash_document(doc, k, mode);
    keep[i] = 1;
  });
  std::vector<HashSet> kept;
  kept.reserve(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (keep[i]) kept.push_back(std::move(sets[i]));
  }
  sets.clear();
  sets.shrink_to_fit();
  return build(kept, k, pbc::hash_fn_id(mode));
}

void InvertedIndex::rebuild_directory() {
  if (keys_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidParameterError("too many distinct hashes for one index");
  }
  dir_bits_ = 0;
  while (dir_bits_ < kMaxDirBits && (std::size_t{1} << dir_bits_) < keys_.size()) ++dir_bits_;
  const std::size_t buckets = std::size_t{1} << dir_bits_;
  directory_.assign(buckets + 1, 0);
  std::size_t i = 0;
  for (std::size_t b = 0; b < buckets; ++b) {
    directory_[b] = static_cast<std::uint32_t>(i);
    while (i < keys_.size() && (dir_bits_ == 0 ? 0 : keys_[i].prefix64() >> (64 - dir_bits_)) == b) ++i;
  }
  directory_[buckets] = static_cast<std::uint32_t>(keys_.size());
}

std::size_t InvertedIndex::find(const Digest& hash) const {
  const std::size_t b = dir_bits_ == 0 ? 0 : static_cast<std::size_t>(hash.prefix64() >> (64 - dir_bits_));
  const auto first = keys_.begin() + directory_[b];
  const auto last = keys_.begin() + directory_[b + 1];
  const auto it = std::lower_bound(first, last, hash);
  if (it == last || *it != hash) return keys_.size();
  return static_cast<std::size_t>(it - keys_.begin());
}

void InvertedIndex::find_batch(std::span<const Digest> hashes, std::vector<std::size_t>& found) const {
  constexpr std::size_t kBlock = 32;
  found.clear();
  std::size_t bucket[kBlock];
  std::size_t hit[kBlock];
  for (std::size_t base = 0; base < hashes.size(); base += kBlock) {
    const std::size_t n = std::min(kBlock, hashes.size() - base);
    // Each stage touches one level of the structure for the whole block, so
    // the misses of one lookup overlap with those of the others.
    for (std::size_t i = 0; i < n; ++i) {
      bucket[i] = dir_bits_ == 0 ? 0 : static_cast<std::size_t>(hashes[base + i].prefix64() >> (64 - dir_bits_));
      __builtin_prefetch(&directory_[bucket[i]]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (directory_[bucket[i]] < keys_.size()) __builtin_prefetch(&keys_[directory_[bucket[i]]]);
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto first = keys_.begin() + directory_[bucket[i]];
      const auto last = keys_.begin() + directory_[bucket[i] + 1];
      const auto it = std::lower_bound(first, last, hashes[base + i]);
      if (it != last && *it == hashes[base + i]) {
        hit[hits] = static_cast<std::size_t>(it - keys_.begin());
        __builtin_prefetch(&offsets_[hit[hits]]);
        ++hits;
      }
    }
    for (std::size_t i = 0; i < hits; ++i) {
      __builtin_prefetch(&postings_[offsets_[hit[i]]]);
      found.push_back(hit[i]);
    }
  }
}

std::uint64_t InvertedIndex::doc_size(std::string_view doc_id) const {
  const auto it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), doc_id);
  if (it == doc_ids_.end() || *it != doc_id) return 0;
  return doc_sizes_[static_cast<std::size_t>(it - doc_ids_.begin())];
}

bool InvertedIndex::contains_doc(std::string_view doc_id) const {
  return std::binary_search(doc_ids_.begin(), doc_ids_.end(), doc_id);
}

std::vector<std::string> InvertedIndex::postings(const Digest& hash) const {
  std::vector<std::string> out;
  const std::size_t i = find(hash);
  if (i == keys_.size()) return out;
  for (std::uint64_t p = offsets_[i]; p < offsets_[i + 1]; ++p) out.push_back(doc_ids_[postings_[p]]);
  return out;
}

void InvertedIndex::check_query(const HashSet& query) const {
  if (query.k != k_) {
    throw ConfigMismatchError("query uses k = " + std::to_string(query.k) + " but the index uses k = " +
                              std::to_string(k_));
  }
  if (query.hash_fn_id != hash_fn_id_) {
    throw ConfigMismatchError("query uses hash function " + query.hash_fn_id + " but the index uses " + hash_fn_id_);
  }
}

std::vector<Overlap> InvertedIndex::intersect(const HashSet& query) const {
  check_query(query);
  std::vector<std::size_t> found;
  find_batch(query.hashes, found);
  std::vector<std::uint32_t> counts(doc_ids_.size(), 0);
  for (const std::size_t i : found) {
    for (std::uint64_t p = offsets_[i]; p < offsets_[i + 1]; ++p) ++counts[postings_[p]];
  }
  std::vector<Overlap> out;
  for (std::size_t d = 0; d < counts.size(); ++d) {
    if (counts[d]) out.push_back({doc_ids_[d], counts[d], doc_sizes_[d]});
  }
  return out;
}

std::vector<Overlap> InvertedIndex::intersect_exclusive(const HashSet& query) const {
  check_query(query);
  const auto self_it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), query.doc_id);
  const bool self_indexed = self_it != doc_ids_.end() && *self_it == query.doc_id;
  const auto self = static_cast<std::uint32_t>(self_it - doc_ids_.begin());

  std::vector<std::size_t> found;
  find_batch(query.hashes, found);
  std::vector<std::uint32_t> counts(doc_ids_.size(), 0);
  for (const std::size_t i : found) {
    const std::uint64_t len = offsets_[i + 1] - offsets_[i];
    const std::uint32_t* list = postings_.data() + offsets_[i];
    if (!self_indexed) {
      if (len == 1) ++counts[list[0]];
    } else if (len == 2 && (list[0] == self || list[1] == self)) {
      ++counts[list[0] == self ? list[1] : list[0]];
    }
  }
  std::vector<Overlap> out;
  for (std::size_t d = 0; d < counts.size(); ++d) {
    if (counts[d]) out.push_back({doc_ids_[d], counts[d], doc_sizes_[d]});
  }
  return out;
}

OccurrenceHistogram InvertedIndex::occurrence_histogram() const {
  if (keys_.empty()) throw EmptySetError("occurrence histogram of an empty index");
  OccurrenceHistogram h;
  h.total_hashes = keys_.size();
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    switch (offsets_[i + 1] - offsets_[i]) {
      case 1: ++h.in_1; break;
      case 2: ++h.in_2; break;
      case 3: ++h.in_3; break;
      default: break;
    }
  }
  h.ratio_in_1 = Fraction(h.in_1, h.total_hashes);
  h.ratio_in_2 = Fraction(h.in_2, h.total_hashes);
  h.ratio_in_3 = Fraction(h.in_3, h.total_hashes);
  return h;
}

InvertedIndex InvertedIndex::with_document(const HashSet& set) const {
  check_query(set);
  InvertedIndex next(k_, hash_fn_id_);

  // New document table and the old -> new position map.
  const auto ins = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), set.doc_id);
  const auto new_pos = static_cast<std::uint32_t>(ins - doc_ids_.begin());
  const bool replacing = ins != doc_ids_.end() && *ins == set.doc_id;
  next.doc_ids_ = doc_ids_;
  next.doc_sizes_ = doc_sizes_;
  if (replacing) {
    next.doc_sizes_[new_pos] = set.size();
  } else {
    next.doc_ids_.insert(next.doc_ids_.begin() + new_pos, set.doc_id);
    next.doc_sizes_.insert(next.doc_sizes_.begin() + new_pos, set.size());
  }
  const auto remap = [&](std::uint32_t old) -> std::uint32_t {
    return (!replacing && old >= new_pos) ? old + 1 : old;
  };

  next.keys_.reserve(keys_.size() + set.size());
  next.postings_.reserve(postings_.size() + set.size());
  next.offsets_.clear();

  std::vector<std::uint32_t> list;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < keys_.size() || j < set.hashes.size()) {
    const bool take_old = i < keys_.size() && (j == set.hashes.size() || keys_[i] <= set.hashes[j]);
    const bool take_new = j < set.hashes.size() && (i == keys_.size() || set.hashes[j] <= keys_[i]);
    const Digest& key = take_old ? keys_[i] : set.hashes[j];
    list.clear();
    if (take_old) {
      for (std::uint64_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
        if (replacing && postings_[p] == new_pos) continue;
        list.push_back(remap(postings_[p]));
      }
      ++i;
    }
    if (take_new) {
      list.insert(std::upper_bound(list.begin(), list.end(), new_pos), new_pos);
      ++j;
    }
    if (list.empty()) continue;
    next.keys_.push_back(key);
    next.offsets_.push_back(next.postings_.size());
    next.postings_.insert(next.postings_.end(), list.begin(), list.end());
  }
  next.offsets_.push_back(next.postings_.size());
  next.rebuild_directory();
  return next;
}

// Layout (integers little-endian):
//   "PBCINDEX" | version u32 | k u32 | hash_fn_id: u16 length + bytes
//   | n_docs u64 | n_entries u64 | n_postings u64 | crc32(body) u32
// body:
//   per entry, ascending: 20-byte big-endian hash | varint count
//     | varint first position | varint gaps to the following positions
//   per document, ascending doc_id: varint length | id bytes | varint |H_d|
void InvertedIndex::write(std::ostream& out) const {
  std::string body;
  body.reserve(keys_.size() * 23 + doc_ids_.size() * 16);
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    body.append(reinterpret_cast<const char*>(keys_[i].bytes.data()), Digest::kBytes);
    put_varint(body, offsets_[i + 1] - offsets_[i]);
    std::uint32_t prev = 0;
    for (std::uint64_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      put_varint(body, p == offsets_[i] ? postings_[p] : postings_[p] - prev);
      prev = postings_[p];
    }
  }
  for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
    put_varint(body, doc_ids_[d].size());
    body += doc_ids_[d];
    put_varint(body, doc_sizes_[d]);
  }

  std::string header(kIndexMagic, sizeof kIndexMagic);
  put_le(header, kIndexVersion, 4);
  put_le(header, k_, 4);
  put_le(header, hash_fn_id_.size(), 2);
  header += hash_fn_id_;
  put_le(header, doc_ids_.size(), 8);
  put_le(header, keys_.size(), 8);
  put_le(header, postings_.size(), 8);
  put_le(header, crc(body), 4);

  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("failed writing index");
}

InvertedIndex InvertedIndex::read(std::istream& in) {
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(data);
  if (data.size() < sizeof kIndexMagic || !std::equal(kIndexMagic, kIndexMagic + sizeof kIndexMagic, data.begin())) {
    throw CorruptFileError("not an index file (bad magic)");
  }
  r.bytes(sizeof kIndexMagic);
  const auto version = r.le(4);
  if (version != kIndexVersion) throw CorruptFileError("unsupported index version " + std::to_string(version));
  const auto k = r.le(4);
  const auto id_len = r.le(2);
  const std::string fn_id(r.bytes(id_len));
  const auto n_docs = r.le(8);
  const auto n_entries = r.le(8);
  const auto n_postings = r.le(8);
  const auto checksum = static_cast<std::uint32_t>(r.le(4));
  if (k == 0) throw CorruptFileError("index header has k = 0");
  if (crc(std::string_view(data).substr(r.pos())) != checksum) throw CorruptFileError("index checksum mismatch");

  InvertedIndex index(k, fn_id);
  // Each entry needs at least 22 bytes, so absurd counts fail before allocating.
  if (n_entries > data.size() / 22 || n_postings > data.size() || n_docs > data.size()) {
    throw CorruptFileError("index header counts exceed file size");
  }
  index.keys_.resize(n_entries);
  index.offsets_.clear();
  index.offsets_.reserve(n_entries + 1);
  index.postings_.reserve(n_postings);
  for (std::uint64_t e = 0; e < n_entries; ++e) {
    const auto raw = r.bytes(Digest::kBytes);
    std::copy(raw.begin(), raw.end(), index.keys_[e].bytes.begin());
    const auto len = r.varint();
    if (len == 0 || index.postings_.size() + len > n_postings) throw CorruptFileError("bad posting list length");
    index.offsets_.push_back(index.postings_.size());
    std::uint64_t pos = 0;
    for (std::uint64_t p = 0; p < len; ++p) {
      const auto v = r.varint();
      if (p > 0 && v == 0) throw CorruptFileError("posting list not strictly ascending");
      pos = p == 0 ? v : pos + v;
      if (pos >= n_docs) throw CorruptFileError("posting refers to an unknown document");
      index.postings_.push_back(static_cast<std::uint32_t>(pos));
    }
  }
  index.offsets_.push_back(index.postings_.size());
  for (std::uint64_t d = 0; d < n_docs; ++d) {
    const auto len = r.varint();
    index.doc_ids_.emplace_back(r.bytes(len));
    index.doc_sizes_.push_back(r.varint());
  }
  if (!r.done()) throw CorruptFileError("trailing bytes after index body");
  if (index.postings_.size() != n_postings) throw CorruptFileError("posting count mismatch");
  index.rebuild_directory();
  index.validate();
  return index;
}

void InvertedIndex::validate() const {
  if (offsets_.size() != keys_.size() + 1 || offsets_.front() != 0 || offsets_.back() != postings_.size()) {
    throw CorruptFileError("index offsets inconsistent");
  }
  if (doc_sizes_.size() != doc_ids_.size()) throw CorruptFileError("document table inconsistent");
  for (std::size_t d = 1; d < doc_ids_.size(); ++d) {
    if (!(doc_ids_[d - 1] < doc_ids_[d])) throw CorruptFileError("document ids not strictly ascending");
  }
  for (std::size_t i = 1; i < keys_.size(); ++i) {
    if (!(keys_[i - 1] < keys_[i])) throw CorruptFileError("hash keys not strictly ascending");
  }
  std::vector<std::uint64_t> per_doc(doc_ids_.size(), 0);
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (offsets_[i + 1] <= offsets_[i]) throw CorruptFileError("empty posting list");
    for (std::uint64_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      if (postings_[p] >= doc_ids_.size()) throw CorruptFileError("posting refers to an unknown document");
      if (p > offsets_[i] && postings_[p] <= postings_[p - 1]) {
        throw CorruptFileError("posting list not strictly ascending");
      }
      ++per_doc[postings_[p]];
    }
  }
  if (per_doc != doc_sizes_) throw CorruptFileError("posting totals disagree with document sizes");
}

std::uintmax_t InvertedIndex::persist(const std::filesystem::path& path) const {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write index file " + tmp.string());
    write(out);
    out.close();
    if (!out) throw IoError("failed writing index file " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move index into place at " + path.string() + ": " + ec.message());
  return std::filesystem::file_size(path);
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read index file " + path.string());
  return read(in);
}

std::uint64_t InvertedIndex::serialized_size() const {
  std::ostringstream out;
  write(out);
  return out.str().size();
}

bool operator==(const InvertedIndex& a, const InvertedIndex& b) {
  return a.k_ == b.k_ && a.hash_fn_id_ == b.hash_fn_id_ && a.doc_ids_ == b.doc_ids_ &&
         a.doc_sizes_ == b.doc_sizes_ && a.keys_ == b.keys_ && a.offsets_ == b.offsets_ && a.postings_ == b.postings_;
}

std::string stats_text(const InvertedIndex& index) {
  std::ostringstream s;
  s << "k           " << index.k() << '\n'
    << "hash_fn     " << index.hash_fn_id() << '\n'
    << "documents   " << index.doc_count() << '\n'
    << "entries     " << index.entry_count() << '\n'
    << "postings    " << index.posting_count() << '\n';
  if (!index.empty()) {
    const auto h = index.occurrence_histogram();
    s << "ratio_in_1  " << h.ratio_in_1.decimal() << '\n'
      << "ratio_in_2  " << h.ratio_in_2.decimal() << '\n'
      << "ratio_in_3  " << h.ratio_in_3.decimal() << '\n';
  }
  s << "bytes       " << index.serialized_size() << '\n';
  return s.str();
}

}  // namespace pbc

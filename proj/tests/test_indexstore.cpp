#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "pbc/errors.hpp"
#include "pbc/indexstore.hpp"
#include "pbc/ingest.hpp"
#include "pbc/synth.hpp"

using namespace pbc;
namespace fs = std::filesystem;

namespace {

Corpus small_corpus(std::uint64_t seed, std::size_t n_docs = 60) {
  GenSpec spec;
  spec.n_docs = n_docs;
  spec.min_refs = 3;
  spec.max_refs = 12;
  spec.pool_size = 40;
  spec.seed = seed;
  const auto filtered = filter_records(generate_corpus(spec), 1);
  Corpus c;
  for (const auto& r : filtered.kept) c.documents.push_back(to_document(r));
  return c;
}

// Brute force: compare the query against every document's hash set.
std::map<std::string, std::uint64_t> brute_intersections(const std::vector<HashSet>& sets, const HashSet& q) {
  std::map<std::string, std::uint64_t> out;
  const std::set<Digest> qs(q.hashes.begin(), q.hashes.end());
  for (const auto& s : sets) {
    std::uint64_t n = 0;
    for (const auto& h : s.hashes) n += qs.count(h);
    if (n) out[s.doc_id] = n;
  }
  return out;
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("pbc_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_SUITE("indexstore") {

TEST_CASE("index intersections equal brute force") {
  const Corpus c = small_corpus(3);
  for (std::size_t k = 1; k <= 3; ++k) {
    std::vector<HashSet> sets;
    for (const auto& d : c.documents) {
      if (d.size() >= k) sets.push_back(hash_document(d, k));
    }
    const InvertedIndex idx = InvertedIndex::build(sets, k, kDefaultHashFnId);
    CHECK(idx == InvertedIndex::build(c, k, CombineMode::ModularSum, 4));
    idx.validate();
    std::uint64_t total = 0;
    for (const auto& s : sets) total += s.size();
    CHECK(idx.posting_count() == total);
    for (const auto& q : sets) {
      std::map<std::string, std::uint64_t> got;
      for (const auto& o : idx.intersect(q)) {
        got[o.doc_id] = o.intersection;
        CHECK(o.size == idx.doc_size(o.doc_id));
      }
      CHECK(got == brute_intersections(sets, q));
    }
  }
}

TEST_CASE("postings lists are sorted doc ids") {
  const Corpus c = small_corpus(4);
  const InvertedIndex idx = InvertedIndex::build(c, 1);
  for (const auto& key : idx.keys()) {
    const auto p = idx.postings(key);
    CHECK_FALSE(p.empty());
    CHECK(std::is_sorted(p.begin(), p.end()));
  }
  CHECK(idx.postings(Digest::max()).empty());
}

TEST_CASE("exclusive intersections agree with the posting filter") {
  const Corpus c = small_corpus(5);
  const InvertedIndex idx = InvertedIndex::build(c, 1);
  for (const auto& d : c.documents) {
    const HashSet q = hash_document(d, 1);
    std::map<std::string, std::uint64_t> got;
    for (const auto& o : idx.intersect_exclusive(q)) got[o.doc_id] = o.intersection;
    std::vector<std::vector<std::string>> lists;
    for (const auto& h : q.hashes) lists.push_back(idx.postings(h));
    for (const auto& other : idx.doc_ids()) {
      const auto want = pair_exclusive_filter(lists, q.doc_id, other);
      const auto it = got.find(other);
      CHECK((it == got.end() ? 0 : it->second) == want);
    }
  }
}

TEST_CASE("occurrence histogram") {
  std::vector<HashSet> sets;
  auto set_of = [](std::string id, std::vector<std::uint64_t> vals) {
    HashSet s;
    s.doc_id = std::move(id);
    for (auto v : vals) s.hashes.push_back(Digest::from_u64(v));
    s.canonicalize();
    return s;
  };
  sets.push_back(set_of("a", {1, 2, 3, 4}));
  sets.push_back(set_of("b", {2, 3, 4}));
  sets.push_back(set_of("c", {3, 4}));
  sets.push_back(set_of("d", {4}));
  const InvertedIndex idx = InvertedIndex::build(sets, 1, kDefaultHashFnId);
  const auto h = idx.occurrence_histogram();
  CHECK(h.total_hashes == 4);
  CHECK(h.in_1 == 1);
  CHECK(h.in_2 == 1);
  CHECK(h.in_3 == 1);
  CHECK(h.ratio_in_1 == Fraction(1, 4));
  CHECK_THROWS_AS(InvertedIndex(1, kDefaultHashFnId).occurrence_histogram(), EmptySetError);
}

TEST_CASE("build rejects inconsistent inputs") {
  HashSet a;
  a.doc_id = "a";
  a.k = 2;
  a.hashes = {Digest::from_u64(1)};
  CHECK_THROWS_AS(InvertedIndex::build(std::vector<HashSet>{a}, 1, kDefaultHashFnId), ConfigMismatchError);
  HashSet b = a;
  CHECK_THROWS_AS(InvertedIndex::build(std::vector<HashSet>{a, b}, 2, kDefaultHashFnId), InvalidParameterError);
  const InvertedIndex idx = InvertedIndex::build(std::vector<HashSet>{a}, 2, kDefaultHashFnId);
  HashSet q = a;
  q.k = 3;
  CHECK_THROWS_AS(idx.intersect(q), ConfigMismatchError);
}

TEST_CASE("with_document adds and replaces") {
  const Corpus c = small_corpus(6, 20);
  std::vector<HashSet> sets;
  for (const auto& d : c.documents) sets.push_back(hash_document(d, 1));
  InvertedIndex idx(1, kDefaultHashFnId);
  for (const auto& s : sets) idx = idx.with_document(s);
  CHECK(idx == InvertedIndex::build(sets, 1, kDefaultHashFnId));

  HashSet replacement = sets[0];
  replacement.hashes = {Digest::from_u64(42)};
  const InvertedIndex replaced = idx.with_document(replacement);
  replaced.validate();
  CHECK(replaced.doc_count() == idx.doc_count());
  CHECK(replaced.doc_size(sets[0].doc_id) == 1);
  CHECK(replaced.postings(Digest::from_u64(42)) == std::vector<std::string>{sets[0].doc_id});
  sets[0] = replacement;
  CHECK(replaced == InvertedIndex::build(sets, 1, kDefaultHashFnId));
}

TEST_CASE("persist and load round trip") {
  const Corpus c = small_corpus(7);
  for (std::size_t k = 1; k <= 2; ++k) {
    const InvertedIndex idx = InvertedIndex::build(c, k);
    const fs::path p = temp_path("index_" + std::to_string(k));
    const auto bytes = idx.persist(p);
    CHECK(bytes == fs::file_size(p));
    CHECK(bytes == idx.serialized_size());
    CHECK_FALSE(fs::exists(p.string() + ".tmp"));
    const InvertedIndex back = InvertedIndex::load(p);
    CHECK(back == idx);
    CHECK(back.k() == k);
    fs::remove(p);
  }
  const InvertedIndex empty(3, "sha1-concat");
  std::stringstream ss;
  empty.write(ss);
  const InvertedIndex back = InvertedIndex::read(ss);
  CHECK(back == empty);
  CHECK(back.hash_fn_id() == "sha1-concat");
}

TEST_CASE("corrupt index files are rejected") {
  const InvertedIndex idx = InvertedIndex::build(small_corpus(8), 1);
  std::stringstream ss;
  idx.write(ss);
  const std::string full = ss.str();

  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{30}, full.size() / 2, full.size() - 1}) {
    std::stringstream in(full.substr(0, cut));
    CHECK_THROWS_AS(InvertedIndex::read(in), CorruptFileError);
  }
  std::string flipped = full;
  flipped[full.size() - 3] ^= 0x40;
  std::stringstream in_flipped(flipped);
  CHECK_THROWS_AS(InvertedIndex::read(in_flipped), CorruptFileError);
  std::string bad_magic = full;
  bad_magic[0] = 'X';
  std::stringstream in_magic(bad_magic);
  CHECK_THROWS_AS(InvertedIndex::read(in_magic), CorruptFileError);
  CHECK_THROWS_AS(InvertedIndex::load("/nonexistent/dir/index.pbc"), IoError);
}

TEST_CASE("stats_text mentions the counts") {
  const InvertedIndex idx = InvertedIndex::build(small_corpus(9), 1);
  const std::string text = stats_text(idx);
  CHECK(text.find(std::to_string(idx.entry_count())) != std::string::npos);
  CHECK(text.find(std::to_string(idx.posting_count())) != std::string::npos);
}

}  // TEST_SUITE

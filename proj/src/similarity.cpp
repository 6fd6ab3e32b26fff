#include "pbc/similarity.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_set>

#include "pbc/combinatorics.hpp"
#include "pbc/errors.hpp"

namespace pbc {

Fraction::Fraction(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw InvalidParameterError("fraction with zero denominator");
  const std::uint64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
  const u128 lhs = static_cast<u128>(a.num_) * b.den_;
  const u128 rhs = static_cast<u128>(b.num_) * a.den_;
  return lhs < rhs ? std::strong_ordering::less
                   : (lhs > rhs ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::string Fraction::decimal() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12Lg", static_cast<long double>(num_) / static_cast<long double>(den_));
  return buf;
}

std::string Fraction::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

SimilarityScore bc_strength(std::span<const std::string> refs_a, std::span<const std::string> refs_b) {
  const std::unordered_set<std::string_view> a(refs_a.begin(), refs_a.end());
  const std::unordered_set<std::string_view> b(refs_b.begin(), refs_b.end());
  if (a.empty() || b.empty()) throw EmptySetError("bibliographic coupling needs two non-empty reference sets");
  std::uint64_t common = 0;
  for (const auto& key : a) common += b.count(key);
  return Fraction(common, a.size() + b.size() - common);
}

std::uint64_t intersection_size(const HashSet& a, const HashSet& b) {
  std::uint64_t n = 0;
  auto i = a.hashes.begin();
  auto j = b.hashes.begin();
  while (i != a.hashes.end() && j != b.hashes.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

namespace {

void check_compatible(const HashSet& a, const HashSet& b) {
  if (a.k != b.k) {
    throw ConfigMismatchError("hash sets use different subset sizes: k = " + std::to_string(a.k) + " vs " +
                              std::to_string(b.k));
  }
  if (a.hash_fn_id != b.hash_fn_id) {
    throw ConfigMismatchError("hash sets use different hash functions: " + a.hash_fn_id + " vs " + b.hash_fn_id);
  }
  if (a.empty() || b.empty()) throw EmptySetError("cannot compare an empty hash set");
}

}  // namespace

SimilarityScore jaccard_from_counts(std::uint64_t intersection, std::uint64_t size_a, std::uint64_t size_b) {
  if (intersection > std::min(size_a, size_b)) {
    throw InvalidParameterError("intersection larger than one of the sets");
  }
  const std::uint64_t uni = size_a + size_b - intersection;
  if (uni == 0) throw EmptySetError("Jaccard similarity of two empty sets");
  return Fraction(intersection, uni);
}

SimilarityScore pbc_strength(const HashSet& a, const HashSet& b) {
  check_compatible(a, b);
  return jaccard_from_counts(intersection_size(a, b), a.size(), b.size());
}

SimilarityScore recovered_bc_from_counts(std::uint64_t intersection, std::uint64_t size_a, std::uint64_t size_b,
                                         unsigned k, InverseMode mode) {
  const std::uint64_t shared = inverse_binomial(intersection, k, mode);
  const std::uint64_t refs_a = inverse_binomial(size_a, k, mode);
  const std::uint64_t refs_b = inverse_binomial(size_b, k, mode);
  if (refs_a + refs_b <= shared) throw EmptySetError("recovered reference sets are empty");
  return Fraction(shared, refs_a + refs_b - shared);
}

SimilarityScore recovered_bc(const HashSet& a, const HashSet& b, InverseMode mode) {
  check_compatible(a, b);
  return recovered_bc_from_counts(intersection_size(a, b), a.size(), b.size(), static_cast<unsigned>(a.k), mode);
}

std::vector<PairResult> rank_candidates(const HashSet& query, std::span<const Overlap> overlaps) {
  std::vector<PairResult> out;
  out.reserve(overlaps.size());
  for (const auto& o : overlaps) {
    if (o.intersection == 0) continue;
    PairResult r;
    r.doc_id_a = query.doc_id;
    r.doc_id_b = o.doc_id;
    r.intersection_hashes = o.intersection;
    r.size_b = o.size;
    r.s_pbc = jaccard_from_counts(o.intersection, query.size(), o.size);
    try {
      r.s_bc_recovered = recovered_bc_from_counts(o.intersection, query.size(), o.size, static_cast<unsigned>(query.k));
    } catch (const NotBinomialError&) {
      r.s_bc_recovered.reset();
    }
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const PairResult& a, const PairResult& b) {
    if (a.s_pbc != b.s_pbc) return a.s_pbc > b.s_pbc;
    return a.doc_id_b < b.doc_id_b;
  });
  return out;
}

std::uint64_t pair_exclusive_filter(std::span<const std::vector<std::string>> postings, const std::string& doc_a,
                                    const std::string& doc_b) {
  std::uint64_t n = 0;
  for (const auto& list : postings) {
    std::vector<std::string_view> docs(list.begin(), list.end());
    docs.push_back(doc_a);
    std::sort(docs.begin(), docs.end());
    docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
    const bool has_b = std::binary_search(docs.begin(), docs.end(), std::string_view(doc_b));
    if (docs.size() == 2 && has_b && doc_a != doc_b) ++n;
  }
  return n;
}

}  // namespace pbc

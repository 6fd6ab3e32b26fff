#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "pbc/errors.hpp"
#include "pbc/similarity.hpp"

using namespace pbc;

namespace {

std::vector<std::string> keys(std::initializer_list<int> ids) {
  std::vector<std::string> out;
  for (int i : ids) out.push_back("ref " + std::to_string(i));
  return out;
}

}  // namespace

TEST_SUITE("similarity") {

TEST_CASE("Fraction reduces and formats") {
  const Fraction f(6, 8);
  CHECK(f.num() == 3);
  CHECK(f.den() == 4);
  CHECK(f.str() == "3/4");
  CHECK(f.decimal() == "0.75");
  CHECK(Fraction(1, 3).decimal() == "0.333333333333");
  CHECK(Fraction(0, 5) == Fraction(0, 1));
  CHECK(Fraction(1, 1).decimal() == "1");
  CHECK(Fraction(1, 3) < Fraction(1, 2));
  CHECK(Fraction(2, 4) == Fraction(1, 2));
  CHECK(Fraction(~0ULL - 1, ~0ULL) < Fraction(1, 1));
  CHECK_THROWS_AS(Fraction(1, 0), InvalidParameterError);
}

TEST_CASE("bc_strength matches set algebra") {
  const auto a = keys({1, 2, 3, 4}), b = keys({3, 4, 5});
  CHECK(bc_strength(a, b) == Fraction(2, 5));
  CHECK(bc_strength(a, a) == Fraction(1, 1));
  CHECK(bc_strength(a, keys({9})) == Fraction(0, 1));
  const auto dup = keys({3, 3, 4, 5, 5});
  CHECK(bc_strength(a, dup) == Fraction(2, 5));
  CHECK(bc_strength(a, b) == bc_strength(b, a));
  const std::vector<std::string> none;
  CHECK_THROWS_AS(bc_strength(none, none), EmptySetError);
  CHECK_THROWS_AS(bc_strength(a, none), EmptySetError);
}

TEST_CASE("intersection and Jaccard over hash sets agree with the oracle") {
  std::mt19937 rng(5);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::string> ka, kb;
    for (int i = 0; i < 12; ++i) {
      if (rng() % 2) ka.push_back("r" + std::to_string(i));
      if (rng() % 2) kb.push_back("r" + std::to_string(i));
    }
    if (ka.size() < 2 || kb.size() < 2) continue;
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    const HashSet ha = hash_keys("a", ka, 2), hb = hash_keys("b", kb, 2);
    const auto oa = oracle::hash_set(ka, 2), ob = oracle::hash_set(kb, 2);
    const auto inter = oracle::intersection_count(oa, ob);
    CHECK(intersection_size(ha, hb) == inter);
    CHECK(pbc_strength(ha, hb) == Fraction(inter, oracle::union_count(oa, ob)));
  }
}

TEST_CASE("pbc_strength refuses mixed configurations") {
  const auto ka = keys({1, 2, 3});
  const HashSet a = hash_keys("a", ka, 2), b = hash_keys("b", ka, 1);
  CHECK_THROWS_AS(pbc_strength(a, b), ConfigMismatchError);
  const HashSet c = hash_keys("c", ka, 2, CombineMode::SortedConcatSha1);
  CHECK_THROWS_AS(pbc_strength(a, c), ConfigMismatchError);
}

TEST_CASE("recovered_bc inverts the binomial counts") {
  // |A| = 10, |B| = 8, overlap 4 at k = 2: 45, 28, 6 -> 4 / 14.
  CHECK(recovered_bc_from_counts(6, 45, 28, 2) == Fraction(4, 14));
  // k = 3, |A| = |B| = 6, overlap 5: 20, 20, 10 -> 5 / 7.
  CHECK(recovered_bc_from_counts(10, 20, 20, 3) == Fraction(5, 7));
  CHECK(recovered_bc_from_counts(0, 45, 28, 2) == Fraction(0, 1));
  CHECK_THROWS_AS(recovered_bc_from_counts(5, 45, 28, 2), NotBinomialError);
  CHECK(recovered_bc_from_counts(5, 45, 28, 2, InverseMode::Tolerant) == Fraction(3, 15));
}

TEST_CASE("recovered_bc equals bc_strength on real hash sets") {
  std::mt19937 rng(9);
  for (unsigned k = 1; k <= 3; ++k) {
    for (int t = 0; t < 30; ++t) {
      std::vector<std::string> ka, kb;
      for (int i = 0; i < 14; ++i) {
        const auto r = rng() % 3;
        if (r != 1) ka.push_back("r" + std::to_string(i));
        if (r != 2) kb.push_back("r" + std::to_string(i));
      }
      std::sort(ka.begin(), ka.end());
      std::sort(kb.begin(), kb.end());
      if (ka.size() < k || kb.size() < k) continue;
      const HashSet ha = hash_keys("a", ka, k), hb = hash_keys("b", kb, k);
      std::size_t shared = 0;
      for (const auto& x : ka) shared += std::binary_search(kb.begin(), kb.end(), x);
      if (shared != 0 && shared < k) continue;  // overlap below k is invisible
      CHECK(recovered_bc(ha, hb) == bc_strength(ka, kb));
    }
  }
}

TEST_CASE("rank_candidates orders by score then id and drops zeros") {
  const HashSet q = hash_keys("q", keys({1, 2, 3, 4}), 1);
  const std::vector<Overlap> overlaps = {{"zed", 2, 4}, {"amy", 2, 4}, {"bob", 0, 3}, {"cat", 3, 5}, {"odd", 1, 2}};
  const auto ranked = rank_candidates(q, overlaps);
  REQUIRE(ranked.size() == 4);
  CHECK(ranked[0].doc_id_b == "cat");
  CHECK(ranked[0].s_pbc == Fraction(3, 6));
  CHECK(ranked[1].doc_id_b == "amy");
  CHECK(ranked[2].doc_id_b == "zed");
  CHECK(ranked[3].doc_id_b == "odd");
  CHECK(ranked[0].doc_id_a == "q");
  CHECK(ranked[0].s_bc_recovered == Fraction(3, 6));
}

TEST_CASE("rank_candidates leaves recovery empty for non-binomial counts") {
  const HashSet q = hash_keys("q", keys({1, 2, 3, 4}), 2);  // |H| = 6
  const std::vector<Overlap> overlaps = {{"x", 2, 10}};      // 2 and 10 are not C(m, 2)
  const auto ranked = rank_candidates(q, overlaps);
  REQUIRE(ranked.size() == 1);
  CHECK_FALSE(ranked[0].s_bc_recovered.has_value());
}

TEST_CASE("pair_exclusive_filter") {
  const std::vector<std::vector<std::string>> postings = {{"b"}, {"a", "b"}, {"b", "c"}, {"a", "b", "c"}, {"c"}};
  CHECK(pair_exclusive_filter(postings, "a", "b") == 2);
  CHECK(pair_exclusive_filter(postings, "a", "c") == 1);
}

}  // TEST_SUITE

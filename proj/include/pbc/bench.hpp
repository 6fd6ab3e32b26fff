#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pbc/indexstore.hpp"

namespace pbc {

/// One row of the resource benchmark.
struct BenchReport {
  std::size_t k = 0;
  std::size_t n_docs = 0;
  std::uint64_t n_hashes = 0;           ///< sum of |H_d|
  std::uint64_t expected_hashes = 0;    ///< sum of C(|R_d|, k)
  std::uint64_t distinct_hashes = 0;    ///< index entries
  double gen_seconds = 0;               ///< hashing every document
  double build_seconds = 0;             ///< index construction from the hash sets
  std::uint64_t index_bytes = 0;        ///< serialized index size
  std::size_t n_queries = 0;
  double query_millis_median = 0;       ///< intersect + rank + render, per query
  OccurrenceHistogram histogram;
};

/// Hashes, indexes and queries `corpus` once per k. Queries are the first
/// `n_queries` documents (all of them if fewer), each run against the full
/// index.
std::vector<BenchReport> run_bench(const Corpus& corpus, std::span<const std::size_t> ks, std::size_t n_queries = 100,
                                   unsigned threads = 1);

std::string bench_table(std::span<const BenchReport> rows);
std::string bench_json(std::span<const BenchReport> rows);

}  // namespace pbc

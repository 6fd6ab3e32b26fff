#include "pbc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "pbc/combinatorics.hpp"
#include "pbc/parallel.hpp"
#include "pbc/report.hpp"

namespace pbc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

}  // namespace

std::vector<BenchReport> run_bench(const Corpus& corpus, std::span<const std::size_t> ks, std::size_t n_queries,
                                   unsigned threads) {
  std::vector<BenchReport> rows;
  for (const std::size_t k : ks) {
    BenchReport row;
    row.k = k;

    std::vector<const Document*> docs;
    for (const auto& d : corpus.documents) {
      if (d.refs.size() >= k) docs.push_back(&d);
    }
    row.n_docs = docs.size();
    for (const auto* d : docs) row.expected_hashes += binomial64(d->refs.size(), k);

    auto t0 = Clock::now();
    std::vector<HashSet> sets(docs.size());
    parallel_for(docs.size(), threads, [&](std::size_t i) { sets[i] = hash_document(*docs[i], k); });
    row.gen_seconds = seconds_since(t0);
    for (const auto& s : sets) row.n_hashes += s.size();

    t0 = Clock::now();
    const InvertedIndex index = InvertedIndex::build(sets, k, kDefaultHashFnId);
    row.build_seconds = seconds_since(t0);
    row.distinct_hashes = index.entry_count();
    row.index_bytes = index.serialized_size();
    if (!index.empty()) row.histogram = index.occurrence_histogram();

    row.n_queries = std::min(n_queries, sets.size());
    std::vector<double> millis;
    millis.reserve(row.n_queries);
    std::size_t sink = 0;
    for (std::size_t q = 0; q < row.n_queries; ++q) {
      const auto start = Clock::now();
      const auto overlaps = index.intersect(sets[q]);
      const auto ranked = rank_candidates(sets[q], overlaps);
      sink += match_report_ndjson(ranked).size();
      millis.push_back(seconds_since(start) * 1e3);
    }
    row.query_millis_median = median(std::move(millis));
    // Keep the rendering from being optimised away.
    if (sink == static_cast<std::size_t>(-1)) row.n_queries = 0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string bench_table(std::span<const BenchReport> rows) {
  std::ostringstream out;
  char line[512];
  std::snprintf(line, sizeof line, "%3s %7s %14s %14s %10s %10s %14s %12s %8s\n", "k", "docs", "hashes", "distinct",
                "gen_s", "build_s", "index_bytes", "query_ms", "in_1");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%3zu %7zu %14llu %14llu %10.3f %10.3f %14llu %12.4f %8.4f\n", r.k, r.n_docs,
                  static_cast<unsigned long long>(r.n_hashes), static_cast<unsigned long long>(r.distinct_hashes),
                  r.gen_seconds, r.build_seconds, static_cast<unsigned long long>(r.index_bytes),
                  r.query_millis_median, r.histogram.total_hashes ? r.histogram.ratio_in_1.to_double() : 0.0);
    out << line;
  }
  return out.str();
}

std::string bench_json(std::span<const BenchReport> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"k", r.k},
                   {"n_docs", r.n_docs},
                   {"n_hashes", r.n_hashes},
                   {"expected_hashes", r.expected_hashes},
                   {"distinct_hashes", r.distinct_hashes},
                   {"gen_seconds", r.gen_seconds},
                   {"build_seconds", r.build_seconds},
                   {"index_bytes", r.index_bytes},
                   {"n_queries", r.n_queries},
                   {"query_millis_median", r.query_millis_median},
                   {"ratio_in_1", r.histogram.ratio_in_1.str()},
                   {"ratio_in_2", r.histogram.ratio_in_2.str()},
                   {"ratio_in_3", r.histogram.ratio_in_3.str()}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace pbc

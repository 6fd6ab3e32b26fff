#include "pbc/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

constexpr const char* kWords[] = {
    "adaptive",  "graph",      "learning",  "networks",   "citation",  "analysis", "efficient", "retrieval",
    "semantic",  "document",   "hashing",   "private",    "scalable",  "index",    "neural",    "models",
    "robust",    "estimation", "query",     "optimization", "search",  "language", "detection", "similarity",
    "distributed", "systems",  "secure",    "protocols",  "sparse",    "matrix",   "stochastic", "inference"};
constexpr std::size_t kWordCount = sizeof kWords / sizeof kWords[0];

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string numbered(const char* prefix, std::size_t i, int width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%0*zu", prefix, width, i);
  return buf;
}

// k distinct pool entries not in `exclude`, in draw order.
std::vector<std::size_t> draw(std::mt19937_64& rng, std::size_t pool, std::size_t count,
                              const std::unordered_set<std::size_t>& exclude) {
  const std::size_t available = pool - std::min(pool, exclude.size());
  count = std::min(count, available);
  std::vector<std::size_t> out;
  std::unordered_set<std::size_t> seen;
  while (out.size() < count) {
    const auto v = static_cast<std::size_t>(uniform_below(rng, pool));
    if (exclude.count(v) || !seen.insert(v).second) continue;
    out.push_back(v);
  }
  return out;
}

RawRecord make_record(std::string id, const std::vector<std::size_t>& entries) {
  RawRecord rec;
  rec.id = std::move(id);
  rec.refs.reserve(entries.size());
  for (std::size_t e : entries) rec.refs.push_back(RawReference{pool_title(e), {}, std::nullopt});
  return rec;
}

}  // namespace

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw InvalidParameterError("empty range");
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

std::string pool_title(std::size_t i) {
  const std::uint64_t h = splitmix(i);
  std::string title = "Reference " + std::to_string(i) + ":";
  for (int w = 0; w < 4; ++w) {
    title += ' ';
    title += kWords[(h >> (8 * w)) % kWordCount];
  }
  return title;
}

std::string planted_source_id(std::size_t pair) { return numbered("src", pair, 2); }
std::string planted_suspect_id(std::size_t pair) { return numbered("susp", pair, 2); }

std::vector<RawRecord> generate_corpus(const GenSpec& spec) {
  if (spec.min_refs == 0 || spec.min_refs > spec.max_refs) throw InvalidParameterError("invalid reference range");
  if (spec.pool_size == 0) throw InvalidParameterError("pool must not be empty");
  if (2 * spec.planted_pairs > spec.n_docs) throw InvalidParameterError("more planted documents than documents");
  if (spec.planted_pairs > 0 && spec.planted_overlap > spec.min_refs) {
    throw InvalidParameterError("planted overlap exceeds the minimum reference count");
  }

  std::mt19937_64 rng(spec.seed);
  const auto ref_count = [&] {
    return spec.min_refs + static_cast<std::size_t>(uniform_below(rng, spec.max_refs - spec.min_refs + 1));
  };
  const std::unordered_set<std::size_t> none;

  std::vector<RawRecord> out;
  out.reserve(spec.n_docs);
  const std::size_t regular = spec.n_docs - 2 * spec.planted_pairs;
  for (std::size_t d = 0; d < regular; ++d) {
    out.push_back(make_record(numbered("doc", d, 5), draw(rng, spec.pool_size, ref_count(), none)));
  }
  for (std::size_t p = 0; p < spec.planted_pairs; ++p) {
    const auto source = draw(rng, spec.pool_size, ref_count(), none);
    std::vector<std::size_t> suspect(source.begin(),
                                     source.begin() + static_cast<std::ptrdiff_t>(
                                                          std::min(spec.planted_overlap, source.size())));
    const std::size_t total = std::max(ref_count(), suspect.size());
    // The remainder avoids the source so the overlap is exactly as planted.
    const std::unordered_set<std::size_t> taken(source.begin(), source.end());
    const auto extra = draw(rng, spec.pool_size, total - suspect.size(), taken);
    suspect.insert(suspect.end(), extra.begin(), extra.end());
    out.push_back(make_record(planted_source_id(p), source));
    out.push_back(make_record(planted_suspect_id(p), suspect));
  }
  return out;
}

}  // namespace pbc

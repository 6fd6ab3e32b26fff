#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pbc/ingest.hpp"

namespace pbc {

/// Parameters of the synthetic corpus generator.
struct GenSpec {
  std::size_t n_docs = 1000;  ///< total, planted documents included
  std::size_t min_refs = 10;
  std::size_t max_refs = 50;
  std::size_t pool_size = 20000;
  std::size_t planted_pairs = 0;
  std::size_t planted_overlap = 5;  ///< references each planted pair shares
  std::uint64_t seed = 1;
};

/// Draws uniformly from [0, bound) by rejection so that results only depend on
/// the engine's specified output sequence.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Title of pool entry `i`. Distinct entries have distinct norm_keys.
std::string pool_title(std::size_t i);

/// Ids used for planted pairs; "src-NN" is the source of "susp-NN".
std::string planted_source_id(std::size_t pair);
std::string planted_suspect_id(std::size_t pair);

/// Deterministic for a fixed GenSpec. Regular documents are "doc-NNNNN".
std::vector<RawRecord> generate_corpus(const GenSpec& spec);

}  // namespace pbc
